#pragma once

#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "capacitance.hpp"
#include "profile.hpp"
#include "spectrum.hpp"

// File formats
//
// Profile document:
//   { "material": { "m_star": 0.1 },
//     "profile":  { "left": 0.0, "right": 0.0,
//                   "segments": [ { "kind": "constant", "start": 0, "end": 5, "level": -10 },
//                                 { "kind": "parabola", "start": 5, "end": 9,
//                                   "coefficient": 0.4, "center": 7 } ] } }
// A segment may give "width" instead of "start"/"end"; it then starts where
// the previous one ended (or at 0).
//
// Spectrum: { "method", "energies_eV", "residuals", "warnings"[, "node_counts"] }
// Curve CSV: lg_n_cm2,Cq_F_per_m2,Cq_uF_per_cm2,occupied_subbands

namespace qcap::io {

using json = nlohmann::json;

/// Names the offending field of a profile document.
class ProfileFormatError : public std::runtime_error {
public:
    ProfileFormatError(const std::string& field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(field)
    {
    }
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

namespace detail {

inline const json& require(const json& obj, const std::string& key, const std::string& path)
{
    if (!obj.is_object())
        throw ProfileFormatError(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end())
        throw ProfileFormatError(path + "." + key, "missing");
    return *it;
}

inline double number(const json& v, const std::string& path)
{
    if (!v.is_number())
        throw ProfileFormatError(path, "expected a number");
    return v.get<double>();
}

inline double number_at(const json& obj, const std::string& key, const std::string& path)
{
    return number(require(obj, key, path), path + "." + key);
}

} // namespace detail

struct ProfileDocument {
    Material material;
    PotentialProfile profile;
};

inline Material material_from_json(const json& doc, const std::string& path = "material")
{
    const double m = detail::number_at(doc, "m_star", path);
    if (!(m > 0.0))
        throw ProfileFormatError(path + ".m_star", "must be positive");
    return Material(m);
}

inline PotentialProfile profile_from_json(const json& doc, const std::string& path = "profile")
{
    const double left = detail::number_at(doc, "left", path);
    const double right = detail::number_at(doc, "right", path);
    const json& segs = detail::require(doc, "segments", path);
    if (!segs.is_array() || segs.empty())
        throw ProfileFormatError(path + ".segments", "expected a non-empty array");

    std::vector<Segment> out;
    double cursor = 0.0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const std::string sp = path + ".segments[" + std::to_string(i) + "]";
        const json& s = segs[i];
        const json& kind_v = detail::require(s, "kind", sp);
        if (!kind_v.is_string())
            throw ProfileFormatError(sp + ".kind", "expected a string");
        const std::string kind = kind_v.get<std::string>();

        double start = 0.0, end = 0.0;
        if (s.contains("start") || s.contains("end")) {
            start = detail::number_at(s, "start", sp);
            end = detail::number_at(s, "end", sp);
        } else {
            start = out.empty() ? cursor : out.back().end;
            end = start + detail::number_at(s, "width", sp);
        }
        if (!(start < end))
            throw ProfileFormatError(sp, "start must be below end");
        if (!out.empty() && start != out.back().end)
            throw ProfileFormatError(sp + ".start", "segments must be contiguous");

        if (kind == "constant") {
            out.emplace_back(Constant{detail::number_at(s, "level", sp)}, start, end);
        } else if (kind == "parabola") {
            const double a = detail::number_at(s, "coefficient", sp);
            if (!(a > 0.0))
                throw ProfileFormatError(sp + ".coefficient", "must be positive");
            out.emplace_back(Parabola{a, detail::number_at(s, "center", sp)}, start, end);
        } else {
            throw ProfileFormatError(sp + ".kind", "unknown kind '" + kind + "' (constant|parabola)");
        }
        cursor = end;
    }
    try {
        return PotentialProfile(left, std::move(out), right);
    } catch (const std::invalid_argument& e) {
        throw ProfileFormatError(path, e.what());
    }
}

inline ProfileDocument document_from_json(const json& doc)
{
    if (!doc.is_object())
        throw ProfileFormatError("<root>", "expected an object");
    return {material_from_json(detail::require(doc, "material", "<root>")),
            profile_from_json(detail::require(doc, "profile", "<root>"))};
}

inline json to_json(const Material& m) { return {{"m_star", m.effective_mass_ratio()}}; }

inline json to_json(const PotentialProfile& p)
{
    json segs = json::array();
    for (const auto& s : p.segments()) {
        json j = {{"start", s.start}, {"end", s.end}};
        if (s.is_constant()) {
            j["kind"] = "constant";
            j["level"] = s.level();
        } else {
            const auto& par = std::get<Parabola>(s.shape);
            j["kind"] = "parabola";
            j["coefficient"] = par.coefficient;
            j["center"] = par.center;
        }
        segs.push_back(std::move(j));
    }
    return {{"left", p.left_exterior()}, {"right", p.right_exterior()}, {"segments", std::move(segs)}};
}

inline json to_json(const BoundSpectrum& s)
{
    json j = {{"method", std::string(to_string(s.method))},
              {"energies_eV", s.energies},
              {"residuals", s.residuals},
              {"warnings", s.warnings}};
    if (s.node_counts)
        j["node_counts"] = *s.node_counts;
    return j;
}

inline std::string format_double(const char* fmt, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

/// CSV with '.' decimals and '\n' line endings; byte-stable for a given curve.
inline std::string curve_to_csv(const capacitance::CapacitanceCurve& curve)
{
    std::string out = "lg_n_cm2,Cq_F_per_m2,Cq_uF_per_cm2,occupied_subbands\n";
    for (const auto& s : curve.samples) {
        out += format_double("%.6f", s.lg_n);
        out += ',';
        out += format_double("%.9e", s.cq);
        out += ',';
        out += format_double("%.9e", capacitance::f_per_m2_to_uf_per_cm2(s.cq));
        out += ',';
        out += std::to_string(s.occupied);
        out += '\n';
    }
    return out;
}

inline json to_json(const capacitance::CapacitanceCurve& c)
{
    json samples = json::array();
    for (const auto& s : c.samples)
        samples.push_back({s.lg_n, s.cq, s.occupied});
    return {{"step_densities_cm2", c.step_densities},
            {"step_heights_F_per_m2", c.step_heights},
            {"samples", std::move(samples)}};
}

} // namespace qcap::io
