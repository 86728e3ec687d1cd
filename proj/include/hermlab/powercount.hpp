#pragma once

#include "errors.hpp"
#include "rational.hpp"

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace hermlab {

namespace detail {

// Affine expression c + cH*H + cG*gamma over the rationals.
struct Affine {
    Rational c = 0, cH = 0, cG = 0;
    bool constant() const { return cH == 0 && cG == 0; }
};

class ExprParser {
public:
    ExprParser(std::string_view s, bool allow_symbols) : s_(s), sym_(allow_symbols) {}

    Affine parse()
    {
        Affine a = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return a;
    }

private:
    [[noreturn]] void fail(const std::string& why) const
    {
        throw DomainError("cannot parse rational expression \"" + std::string(s_) + "\": " + why);
    }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    Affine expr()
    {
        Affine acc = term();
        for (;;) {
            skip();
            if (pos_ >= s_.size() || (s_[pos_] != '+' && s_[pos_] != '-')) return acc;
            const bool minus = s_[pos_++] == '-';
            Affine t = term();
            if (minus) {
                acc.c -= t.c;
                acc.cH -= t.cH;
                acc.cG -= t.cG;
            } else {
                acc.c += t.c;
                acc.cH += t.cH;
                acc.cG += t.cG;
            }
        }
    }

    Affine term()
    {
        Affine acc = unary();
        for (;;) {
            skip();
            if (pos_ >= s_.size()) return acc;
            const char op = s_[pos_];
            if (op == '*') {
                ++pos_;
                Affine r = unary();
                if (acc.constant()) acc = scale(r, acc.c);
                else if (r.constant()) acc = scale(acc, r.c);
                else fail("product of two symbolic terms is not affine");
            } else if (op == '/') {
                ++pos_;
                Affine r = unary();
                if (!r.constant()) fail("division by a symbolic term");
                if (r.c == 0) fail("division by zero");
                acc = scale(acc, Rational(1) / r.c);
            } else if (std::isalpha(static_cast<unsigned char>(op)) || op == '(') {
                // implicit product such as 2H or 3(1-H)
                Affine r = unary();
                if (acc.constant()) acc = scale(r, acc.c);
                else if (r.constant()) acc = scale(acc, r.c);
                else fail("product of two symbolic terms is not affine");
            } else {
                return acc;
            }
        }
    }

    Affine unary()
    {
        skip();
        if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) {
            const bool minus = s_[pos_++] == '-';
            Affine a = unary();
            return minus ? scale(a, Rational(-1)) : a;
        }
        return atom();
    }

    Affine atom()
    {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        const char ch = s_[pos_];
        if (ch == '(') {
            ++pos_;
            Affine a = expr();
            skip();
            if (pos_ >= s_.size() || s_[pos_] != ')') fail("missing ')'");
            ++pos_;
            return a;
        }
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            std::size_t b = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            Affine a;
            a.c = Rational(Integer(std::string(s_.substr(b, pos_ - b))));
            if (pos_ < s_.size() && s_[pos_] == '.') {
                // decimal literal, taken exactly: 0.6 -> 3/5
                const std::size_t f = ++pos_;
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
                if (pos_ == f) fail("digits expected after '.'");
                const Integer den = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(pos_ - f));
                a.c += Rational(Integer(std::string(s_.substr(f, pos_ - f)))) / den;
            }
            return a;
        }
        if (std::isalpha(static_cast<unsigned char>(ch))) {
            std::size_t b = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            const std::string name(s_.substr(b, pos_ - b));
            if (!sym_) fail("symbols are not allowed here");
            Affine a;
            if (name == "H") a.cH = 1;
            else if (name == "gamma") a.cG = 1;
            else fail("unknown symbol '" + name + "' (use H or gamma)");
            return a;
        }
        fail("unexpected '" + std::string(1, ch) + "'");
    }

    static Affine scale(Affine a, const Rational& k)
    {
        a.c *= k;
        a.cH *= k;
        a.cG *= k;
        return a;
    }

    std::string_view s_;
    bool sym_;
    std::size_t pos_ = 0;
};

} // namespace detail

// "p/q", "-p/q", an integer or a decimal such as "0.6".
inline Rational parse_rational(std::string_view s)
{
    const detail::Affine a = detail::ExprParser(s, false).parse();
    return a.c;
}

struct SymbolValues {
    std::optional<Rational> H;
    std::optional<Rational> gamma;
};

// Affine expression in H and gamma, e.g. "2H-2", "-gamma", "-(1-H)", "-2/5".
inline Rational eval_exponent(std::string_view s, const SymbolValues& env)
{
    const detail::Affine a = detail::ExprParser(s, true).parse();
    Rational v = a.c;
    if (a.cH != 0) {
        if (!env.H) throw DomainError("exponent \"" + std::string(s) + "\" uses H but no H value was supplied");
        v += a.cH * *env.H;
    }
    if (a.cG != 0) {
        if (!env.gamma)
            throw DomainError("exponent \"" + std::string(s) + "\" uses gamma but no gamma value was supplied");
        v += a.cG * *env.gamma;
    }
    return v;
}

struct AffineFunctional {
    std::vector<Rational> coeffs;
    Rational constant = 0;
};

struct FunctionalSystem {
    std::size_t m = 0;
    std::vector<AffineFunctional> T;
    std::vector<Rational> alphas;
    std::vector<Rational> betas;

    void validate() const
    {
        detail::require(m >= 1, "functional system needs m >= 1");
        detail::require(T.size() == alphas.size() && T.size() == betas.size(), "|T|, |alphas|, |betas| must agree");
        detail::require(T.size() <= 64, "functional system supports at most 64 functionals");
        for (const auto& f : T) {
            detail::require(f.coeffs.size() == m, "functional coefficient count must equal m");
            bool nz = false;
            for (const auto& c : f.coeffs) nz = nz || c != 0;
            detail::require(nz, "functional coefficients must not all be zero");
        }
    }

    std::size_t size() const noexcept { return T.size(); }
};

using Subset = std::uint64_t;  // bit i set <=> M_i in W

inline Subset full_set(const FunctionalSystem& s)
{
    return s.size() == 64 ? ~Subset{0} : ((Subset{1} << s.size()) - 1);
}

inline std::vector<std::size_t> members(Subset w)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; w; ++i, w >>= 1)
        if (w & 1U) out.push_back(i);
    return out;
}

namespace detail {

// Row-echelon basis over Q, grown one vector at a time.
class RowSpace {
public:
    explicit RowSpace(std::size_t m) : m_(m) {}

    std::size_t rank() const noexcept { return rows_.size(); }

    std::vector<Rational> reduce(std::vector<Rational> v) const
    {
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            const std::size_t p = pivots_[r];
            if (v[p] == 0) continue;
            const Rational f = v[p];
            for (std::size_t j = 0; j < m_; ++j) v[j] -= f * rows_[r][j];
        }
        return v;
    }

    bool contains(const std::vector<Rational>& v) const
    {
        for (const auto& x : reduce(v))
            if (x != 0) return false;
        return true;
    }

    // returns true if v was independent of the current rows
    bool insert(const std::vector<Rational>& v)
    {
        auto w = reduce(v);
        std::size_t p = m_;
        for (std::size_t j = 0; j < m_; ++j)
            if (w[j] != 0) {
                p = j;
                break;
            }
        if (p == m_) return false;
        const Rational inv = Rational(1) / w[p];
        for (auto& x : w) x *= inv;
        // keep existing rows reduced at the new pivot
        for (auto& row : rows_) {
            if (row[p] == 0) continue;
            const Rational f = row[p];
            for (std::size_t j = 0; j < m_; ++j) row[j] -= f * w[j];
        }
        rows_.push_back(std::move(w));
        pivots_.push_back(p);
        return true;
    }

private:
    std::size_t m_;
    std::vector<std::vector<Rational>> rows_;
    std::vector<std::size_t> pivots_;
};

inline RowSpace span_of(const FunctionalSystem& s, Subset w)
{
    RowSpace rs(s.m);
    for (auto i : members(w)) rs.insert(s.T[i].coeffs);
    return rs;
}

inline void check_subset(const FunctionalSystem& s, Subset w)
{
    require((w & ~full_set(s)) == 0, "subset refers to functionals outside T");
}

} // namespace detail

// Rank of the linear parts; affine constants play no role.
inline std::size_t rank(const FunctionalSystem& s, Subset w)
{
    detail::check_subset(s, w);
    return detail::span_of(s, w).rank();
}

inline Subset span_closure(const FunctionalSystem& s, Subset w)
{
    s.validate();
    detail::check_subset(s, w);
    const auto rs = detail::span_of(s, w);
    Subset out = w;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (!((w >> i) & 1U) && rs.contains(s.T[i].coeffs)) out |= Subset{1} << i;
    return out;
}

inline bool is_padded(const FunctionalSystem& s, Subset w)
{
    if (span_closure(s, w) != w) return false;
    for (auto i : members(w)) {
        const Subset rest = w & ~(Subset{1} << i);
        if (!((span_closure(s, rest) >> i) & 1U)) return false;
    }
    return true;
}

inline Rational d0(const FunctionalSystem& s, Subset w)
{
    if (span_closure(s, w) != w) throw DomainError("d0 needs a span-closed subset");
    Rational v = static_cast<long>(rank(s, w));
    for (auto i : members(w)) v += s.alphas[i];
    return v;
}

inline Rational d_infinity(const FunctionalSystem& s, Subset w)
{
    if (span_closure(s, w) != w) throw DomainError("d_infinity needs a span-closed subset");
    Rational v = static_cast<long>(rank(s, full_set(s))) - static_cast<long>(rank(s, w));
    for (auto i : members(full_set(s) & ~w)) v += s.betas[i];
    return v;
}

enum class Verdict { finite, not_established, inconclusive };

inline const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::finite: return "finite";
    case Verdict::not_established: return "not_established";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

struct IntegrabilityReport {
    Verdict at_zero = Verdict::finite;
    Verdict at_infinity = Verdict::finite;
    std::optional<Subset> witness_zero;
    std::optional<Subset> witness_infinity;
    bool zero_padded_only = false;
    bool infinity_padded_only = false;
    std::size_t flats_checked_zero = 0;
    std::size_t flats_checked_infinity = 0;
    Rational d0_T = 0;

    bool finite_at_zero() const { return at_zero == Verdict::finite; }
    bool finite_at_infinity() const { return at_infinity == Verdict::finite; }
};

// All span-closed subsets, by closing flats under single additions.
inline std::vector<Subset> enumerate_flats(const FunctionalSystem& s)
{
    std::set<Subset> seen;
    std::vector<Subset> stack{span_closure(s, 0)};
    seen.insert(stack.back());
    while (!stack.empty()) {
        const Subset f = stack.back();
        stack.pop_back();
        for (std::size_t i = 0; i < s.size(); ++i) {
            if ((f >> i) & 1U) continue;
            const Subset g = span_closure(s, f | (Subset{1} << i));
            if (seen.insert(g).second) stack.push_back(g);
        }
    }
    return {seen.begin(), seen.end()};
}

// Sufficient conditions: d0(W) > 0 for every non-empty span-closed W and
// d_inf(W) < 0 for every proper span-closed W (including the empty set).
// With all alpha_i > -1 (resp. beta_i >= -1) only padded W are needed.
inline IntegrabilityReport check_integrability(const FunctionalSystem& s)
{
    s.validate();
    if (s.size() > 20) throw ResourceError("check_integrability: |T| > 20 exceeds the enumeration cap");
    IntegrabilityReport r;
    const Subset all = full_set(s);
    const auto flats = enumerate_flats(s);
    std::map<Subset, bool> padded;
    auto is_pad = [&](Subset w) {
        auto it = padded.find(w);
        if (it != padded.end()) return it->second;
        return padded[w] = is_padded(s, w);
    };

    bool any_minus_one = false;
    r.zero_padded_only = true;
    for (const auto& a : s.alphas) {
        if (a == -1) any_minus_one = true;
        if (!(a > -1)) r.zero_padded_only = false;
    }
    r.infinity_padded_only = true;
    for (const auto& b : s.betas)
        if (!(b >= -1)) r.infinity_padded_only = false;

    r.d0_T = d0(s, all);
    if (any_minus_one) {
        r.at_zero = Verdict::inconclusive;
    } else {
        for (Subset w : flats) {
            if (w == 0) continue;
            if (r.zero_padded_only && !is_pad(w)) continue;
            ++r.flats_checked_zero;
            if (!(d0(s, w) > 0)) {
                r.at_zero = Verdict::not_established;
                r.witness_zero = w;
                break;
            }
        }
    }
    for (Subset w : flats) {
        if (w == all) continue;
        if (r.infinity_padded_only && !is_pad(w)) continue;
        ++r.flats_checked_infinity;
        if (!(d_infinity(s, w) < 0)) {
            r.at_infinity = Verdict::not_established;
            r.witness_infinity = w;
            break;
        }
    }
    return r;
}

} // namespace hermlab
