#pragma once

#include "errors.hpp"
#include "powercount.hpp"
#include "stats.hpp"

#include <json.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace hermlab {

using json = nlohmann::ordered_json;

inline constexpr const char* version = "1.0.0";

inline json to_json(const MCReport& r)
{
    return json{{"n", r.n},
                {"mean", r.mean},
                {"variance", r.variance},
                {"stderr_mean", r.stderr_mean},
                {"stderr_variance", r.stderr_variance},
                {"seed", r.seed}};
}

// rationals may be given as "p/q" strings, integers, or affine expressions
// in H and gamma ("-(1-H)", "-gamma") evaluated against env
inline Rational rational_field(const json& v, const SymbolValues& env, const std::string& where)
{
    if (v.is_string()) return eval_exponent(v.get<std::string>(), env);
    if (v.is_number_integer()) return Rational(v.get<long long>());
    throw DomainError(where + ": expected a rational string such as \"-2/5\"");
}

inline FunctionalSystem parse_system(const json& j, const SymbolValues& env = {})
{
    auto need = [&](const char* key) -> const json& {
        if (!j.contains(key)) throw DomainError(std::string("powercount spec: missing key \"") + key + "\"");
        return j.at(key);
    };
    FunctionalSystem s;
    const auto& m = need("m");
    if (!m.is_number_integer() || m.get<long long>() < 1) throw DomainError("powercount spec: m must be a positive integer");
    s.m = m.get<std::size_t>();
    for (const auto& f : need("functionals")) {
        AffineFunctional a;
        for (const auto& c : f.at("coeffs")) a.coeffs.push_back(rational_field(c, {}, "coeffs"));
        if (f.contains("const")) a.constant = rational_field(f.at("const"), {}, "const");
        s.T.push_back(std::move(a));
    }
    for (const auto& a : need("alphas")) s.alphas.push_back(rational_field(a, env, "alphas"));
    for (const auto& b : need("betas")) s.betas.push_back(rational_field(b, env, "betas"));
    s.validate();
    return s;
}

inline FunctionalSystem load_system(const std::string& path, const SymbolValues& env = {})
{
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open powercount spec " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw DomainError("powercount spec " + path + " is not valid JSON: " + e.what());
    }
    return parse_system(j, env);
}

inline json subset_json(const std::optional<Subset>& w)
{
    if (!w) return nullptr;
    json a = json::array();
    for (auto i : members(*w)) a.push_back(i);
    return a;
}

inline json to_json(const FunctionalSystem& s, const IntegrabilityReport& r)
{
    return json{{"finite_at_zero", r.finite_at_zero()},
                {"finite_at_infinity", r.finite_at_infinity()},
                {"d0_T", to_string(r.d0_T)},
                {"d_infinity_empty", to_string(d_infinity(s, span_closure(s, 0)))},
                {"verdict_zero", to_string(r.at_zero)},
                {"verdict_infinity", to_string(r.at_infinity)},
                {"witness_zero", subset_json(r.witness_zero)},
                {"witness_infinity", subset_json(r.witness_infinity)},
                {"padded_only_zero", r.zero_padded_only},
                {"padded_only_infinity", r.infinity_padded_only},
                {"rank_T", rank(s, full_set(s))}};
}

inline std::string utc_timestamp(std::chrono::system_clock::time_point tp)
{
    const std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

struct RunManifest {
    std::string command;
    json flags = json::object();
    std::uint64_t seed = 0;
    std::chrono::system_clock::time_point start = std::chrono::system_clock::now();
    std::chrono::system_clock::time_point end = start;

    json to_json() const
    {
        return json{{"command", command},
                    {"flags", flags},
                    {"master_seed", seed},
                    {"tool_version", version},
                    {"start", utc_timestamp(start)},
                    {"end", utc_timestamp(end)},
                    {"elapsed_seconds", std::chrono::duration<double>(end - start).count()}};
    }
};

} // namespace hermlab
