#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <qcap/io.hpp>
#include <qcap/qcap.hpp>

namespace fs = std::filesystem;
using qcap::io::json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kSolver = 2, kIo = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string well = "finite";
    double a = 5.0;
    double depth = 10.0;
    double gap = 2.0;
    double x0 = 5.0;
    double mstar = 0.1;
    int figure = 0;
    std::size_t layers = qcap::ScanConfig{}.layers;
    double tol = qcap::ScanConfig{}.tol;
    std::size_t grid_points = qcap::ScanConfig{}.grid_points;
    std::size_t count = 0;
    std::string engine = "auto";
    std::string parity = "auto";
    std::string profile_file;
    std::string out;
    std::string format;
    bool strict = false;
    double dx = qcap::oracle::NumerovConfig{}.dx;
    std::optional<double> check_tol;
    double lg_min = 10.0;
    double lg_max = 15.0;
    std::size_t points = 500;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write '" + path + "'");
    out << text;
    if (!out)
        throw IoError("write failed for '" + path + "'");
}

json parse_json_text(const std::string& text, const std::string& origin)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw IoError(origin + ": malformed JSON (" + e.what() + ")");
    }
}

// Applies config-file entries to every option the command line left unset.
void apply_config(const json& cfg, CLI::App& cmd, Options& o)
{
    if (!cfg.is_object())
        throw UsageError("config file must hold a JSON object");
    using Setter = std::function<void(const json&)>;
    const std::map<std::string, Setter> setters = {
        {"well", [&](const json& v) { o.well = v.get<std::string>(); }},
        {"a", [&](const json& v) { o.a = v.get<double>(); }},
        {"depth", [&](const json& v) { o.depth = v.get<double>(); }},
        {"gap", [&](const json& v) { o.gap = v.get<double>(); }},
        {"x0", [&](const json& v) { o.x0 = v.get<double>(); }},
        {"mstar", [&](const json& v) { o.mstar = v.get<double>(); }},
        {"figure", [&](const json& v) { o.figure = v.get<int>(); }},
        {"layers", [&](const json& v) { o.layers = v.get<std::size_t>(); }},
        {"tol", [&](const json& v) { o.tol = v.get<double>(); }},
        {"grid-points", [&](const json& v) { o.grid_points = v.get<std::size_t>(); }},
        {"count", [&](const json& v) { o.count = v.get<std::size_t>(); }},
        {"engine", [&](const json& v) { o.engine = v.get<std::string>(); }},
        {"parity", [&](const json& v) { o.parity = v.get<std::string>(); }},
        {"profile", [&](const json& v) { o.profile_file = v.get<std::string>(); }},
        {"out", [&](const json& v) { o.out = v.get<std::string>(); }},
        {"format", [&](const json& v) { o.format = v.get<std::string>(); }},
        {"strict", [&](const json& v) { o.strict = v.get<bool>(); }},
        {"dx", [&](const json& v) { o.dx = v.get<double>(); }},
        {"check-tol", [&](const json& v) { o.check_tol = v.get<double>(); }},
        {"lg-min", [&](const json& v) { o.lg_min = v.get<double>(); }},
        {"lg-max", [&](const json& v) { o.lg_max = v.get<double>(); }},
        {"points", [&](const json& v) { o.points = v.get<std::size_t>(); }},
    };
    for (const auto& [key, value] : cfg.items()) {
        auto it = setters.find(key);
        if (it == setters.end())
            throw UsageError("config: unknown key '" + key + "'");
        auto* opt = cmd.get_option_no_throw("--" + key);
        if (opt && opt->count() > 0)
            continue;
        try {
            it->second(value);
        } catch (const json::exception&) {
            throw UsageError("config: wrong type for '" + key + "'");
        }
    }
}

void add_common(CLI::App& cmd, Options& o)
{
    cmd.add_option("--well", o.well, "infinite|finite|double|parabolic")
        ->check(CLI::IsMember({"infinite", "finite", "double", "parabolic"}));
    cmd.add_option("--a", o.a, "well width in nm (each well of a double well)");
    cmd.add_option("--depth", o.depth, "well depth in eV");
    cmd.add_option("--gap", o.gap, "double-well barrier width in nm");
    cmd.add_option("--x0", o.x0, "parabolic double-well half-offset in nm");
    cmd.add_option("--mstar", o.mstar, "effective mass ratio m*/m0");
    cmd.add_option("--figure", o.figure, "reference figure preset 1..6")->check(CLI::Range(1, 6));
    cmd.add_option("--profile", o.profile_file, "profile JSON document instead of --well flags");
    cmd.add_option("--layers", o.layers, "staircase layers per parabolic segment")->check(CLI::PositiveNumber);
    cmd.add_option("--tol", o.tol, "root tolerance in eV")->check(CLI::PositiveNumber);
    cmd.add_option("--grid-points", o.grid_points, "energy scan grid size")->check(CLI::Range(100, 10000000));
    cmd.add_option("--count", o.count, "number of levels to report (infinite well: levels computed)");
    cmd.add_option("--out", o.out, "output file, or directory for figure presets");
    cmd.add_option("--format", o.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    cmd.add_flag("--strict", o.strict, "exit 2 on any solver warning");
    cmd.add_option("--parity", o.parity, "auto|off: even/odd split for symmetric profiles")
        ->check(CLI::IsMember({"auto", "off"}));
    cmd.add_option("--dx", o.dx, "Numerov step in nm")->check(CLI::PositiveNumber);
}

qcap::ScanConfig scan_config(const Options& o)
{
    qcap::ScanConfig cfg;
    cfg.layers = o.layers;
    cfg.tol = o.tol;
    cfg.grid_points = o.grid_points;
    cfg.parity_split = o.parity == "off" ? qcap::ParitySplit::Off : qcap::ParitySplit::Auto;
    return cfg;
}

qcap::presets::WellSpec well_from_flags(const Options& o)
{
    qcap::presets::WellSpec w;
    try {
        w.geometry = qcap::presets::parse_geometry(o.well);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (!(o.a > 0.0))
        throw UsageError("--a must be positive");
    if (!(o.depth > 0.0))
        throw UsageError("--depth must be positive");
    if (!(o.gap >= 0.0))
        throw UsageError("--gap must be non-negative");
    if (!(o.x0 > 0.0))
        throw UsageError("--x0 must be positive");
    if (!(o.mstar > 0.0))
        throw UsageError("--mstar must be positive");
    w.width = o.a;
    w.depth = o.depth;
    w.gap = o.gap;
    w.x0 = o.x0;
    w.mass_ratio = o.mstar;
    return w;
}

struct Job {
    std::string label;
    qcap::Material material{0.1};
    std::optional<qcap::PotentialProfile> profile;
    std::optional<qcap::presets::WellSpec> well;
    std::vector<std::string> assumptions;
};

qcap::io::ProfileDocument load_document(const std::string& path)
{
    const json doc = parse_json_text(read_file(path), path);
    try {
        return qcap::io::document_from_json(doc);
    } catch (const qcap::io::ProfileFormatError& e) {
        throw UsageError(path + ": invalid profile, field " + e.what());
    }
}

std::vector<Job> jobs_for(const Options& o, std::size_t infinite_levels)
{
    const int sources = (o.figure != 0) + !o.profile_file.empty();
    if (sources > 1)
        throw UsageError("give exactly one profile source: --figure, --profile or --well flags");
    std::vector<Job> jobs;
    auto from_well = [&](qcap::presets::WellSpec w) {
        w.infinite_levels = infinite_levels;
        Job j;
        j.label = w.label();
        j.material = w.material();
        j.assumptions = w.assumptions;
        j.well = w;
        return j;
    };
    if (o.figure != 0) {
        for (auto w : qcap::presets::figure(o.figure).wells) {
            w.mass_ratio = o.mstar;
            jobs.push_back(from_well(w));
        }
    } else if (!o.profile_file.empty()) {
        auto doc = load_document(o.profile_file);
        Job j;
        j.label = fs::path(o.profile_file).stem().string();
        j.material = doc.material;
        j.profile = std::move(doc.profile);
        jobs.push_back(std::move(j));
    } else {
        jobs.push_back(from_well(well_from_flags(o)));
    }
    return jobs;
}

qcap::BoundSpectrum solve_job(const Job& job, const Options& o)
{
    const auto cfg = scan_config(o);
    if (o.engine == "numerov") {
        qcap::oracle::NumerovConfig ncfg;
        ncfg.dx = o.dx;
        if (job.well && job.well->geometry == qcap::presets::Geometry::Infinite) {
            const auto ref = qcap::infinite_well_levels(job.well->width, job.material, job.well->infinite_levels + 1);
            const double cut = 0.5 * (ref.energies[ref.size() - 2] + ref.energies.back());
            return qcap::oracle::numerov_bound_states(job.well->profile(), job.material, ncfg, cut);
        }
        return qcap::oracle::numerov_bound_states(job.profile ? *job.profile : job.well->profile(), job.material,
                                                  ncfg);
    }
    if (o.engine == "determinant") {
        if (!job.well || job.well->geometry != qcap::presets::Geometry::Parabolic)
            throw UsageError("--engine determinant needs --well parabolic");
        const auto& w = *job.well;
        return qcap::parabolic_double_well_levels(qcap::parabolic_coefficient_for_depth(w.depth, w.x0), w.x0,
                                                  job.material, cfg);
    }
    if (job.profile)
        return qcap::bound_states(*job.profile, job.material, cfg);
    return qcap::presets::solve(*job.well, cfg);
}

void truncate(qcap::BoundSpectrum& s, std::size_t count)
{
    if (count == 0 || count >= s.size())
        return;
    s.energies.resize(count);
    s.residuals.resize(count);
    if (s.node_counts)
        s.node_counts->resize(count);
}

std::string levels_csv(const qcap::BoundSpectrum& s)
{
    std::string out = "index,energy_eV,residual\n";
    char buf[128];
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.12f,%.3e\n", i, s.energies[i], s.residuals[i]);
        out += buf;
    }
    return out;
}

void report_warnings(const qcap::BoundSpectrum& s, const std::string& label, bool& warned)
{
    for (const auto& w : s.warnings) {
        std::cerr << "warning [" << label << "]: " << w << '\n';
        warned = true;
    }
}

fs::path figure_dir(const Options& o)
{
    fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw IoError("cannot create output directory '" + dir.string() + "'");
    return dir;
}

json job_metadata(const Job& job, const std::string& file)
{
    json j = {{"label", job.label}, {"file", file}, {"m_star", job.material.effective_mass_ratio()}};
    if (job.well) {
        const auto& w = *job.well;
        j["well"] = qcap::presets::geometry_name(w.geometry);
        j["a_nm"] = w.width;
        if (w.geometry != qcap::presets::Geometry::Infinite)
            j["depth_eV"] = w.depth;
        if (w.geometry == qcap::presets::Geometry::DoubleRect)
            j["gap_nm"] = w.gap;
        if (w.geometry == qcap::presets::Geometry::Parabolic) {
            j.erase("a_nm");
            j["x0_nm"] = w.x0;
        }
    }
    j["assumptions"] = job.assumptions;
    return j;
}

void write_figure_manifest(const fs::path& dir, int figure, const std::vector<Job>& jobs,
                           const std::vector<std::string>& files)
{
    json wells = json::array();
    for (std::size_t i = 0; i < jobs.size(); ++i)
        wells.push_back(job_metadata(jobs[i], files[i]));
    const json manifest = {{"figure", figure}, {"wells", std::move(wells)}};
    write_output((dir / ("fig" + std::to_string(figure) + "_manifest.json")).string(), manifest.dump(2) + "\n");
}

int cmd_levels(const Options& o)
{
    const auto jobs = jobs_for(o, o.count == 0 ? 10 : o.count);
    const std::string format = o.format.empty() ? "json" : o.format;
    bool warned = false;
    std::vector<std::pair<const Job*, qcap::BoundSpectrum>> results;
    for (const auto& job : jobs) {
        auto s = solve_job(job, o);
        truncate(s, o.count);
        report_warnings(s, job.label, warned);
        results.emplace_back(&job, std::move(s));
    }

    if (o.figure != 0) {
        const fs::path dir = figure_dir(o);
        std::vector<std::string> files;
        for (const auto& [job, s] : results) {
            const std::string name = "fig" + std::to_string(o.figure) + "_" + job->label + "_levels." + format;
            write_output((dir / name).string(), format == "csv" ? levels_csv(s) : qcap::io::to_json(s).dump(2) + "\n");
            files.push_back(name);
        }
        std::vector<Job> js;
        for (const auto& r : results)
            js.push_back(*r.first);
        write_figure_manifest(dir, o.figure, js, files);
    } else {
        const auto& s = results.front().second;
        write_output(o.out, format == "csv" ? levels_csv(s) : qcap::io::to_json(s).dump(2) + "\n");
    }
    return (o.strict && warned) ? kSolver : kOk;
}

int cmd_cq(const Options& o)
{
    const auto jobs = jobs_for(o, o.count == 0 ? 60 : o.count);
    const std::string format = o.format.empty() ? "csv" : o.format;
    std::vector<double> grid;
    try {
        grid = qcap::capacitance::log_density_grid(o.lg_min, o.lg_max, o.points);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    bool warned = false;
    auto render = [&](const Job& job) {
        const auto s = solve_job(job, o);
        report_warnings(s, job.label, warned);
        const auto curve = qcap::capacitance::capacitance_vs_density(s, job.material, grid);
        return format == "csv" ? qcap::io::curve_to_csv(curve) : qcap::io::to_json(curve).dump(2) + "\n";
    };

    if (o.figure != 0) {
        const fs::path dir = figure_dir(o);
        std::vector<std::string> files;
        for (const auto& job : jobs) {
            for (const auto& note : job.assumptions)
                std::cerr << "note [" << job.label << "]: " << note << '\n';
            const std::string name = "fig" + std::to_string(o.figure) + "_" + job.label + "." + format;
            write_output((dir / name).string(), render(job));
            files.push_back(name);
        }
        write_figure_manifest(dir, o.figure, jobs, files);
    } else {
        write_output(o.out, render(jobs.front()));
    }
    return (o.strict && warned) ? kSolver : kOk;
}

int cmd_crosscheck(const Options& o)
{
    const auto jobs = jobs_for(o, o.count == 0 ? 10 : o.count);
    Options reference = o;
    reference.engine = "auto";
    Options oracle = o;
    oracle.engine = "numerov";

    std::ostringstream report;
    bool ok = true;
    char buf[160];
    for (const auto& job : jobs) {
        auto ref = solve_job(job, reference);
        auto num = solve_job(job, oracle);
        if (job.well && job.well->geometry == qcap::presets::Geometry::Infinite)
            truncate(ref, num.size());
        const bool staircase = job.profile ? !job.profile->constant_only()
                                           : job.well->geometry == qcap::presets::Geometry::Parabolic;
        const double tol = o.check_tol.value_or(staircase ? 1e-4 : 1e-6);

        report << "# " << job.label << "  engine=" << qcap::to_string(ref.method) << "  oracle=numerov";
        if (staircase)
            report << "  layers=" << o.layers;
        report << '\n';
        report << "level,engine_eV,numerov_eV,delta_eV\n";
        double worst = 0.0;
        const std::size_t n = std::min(ref.size(), num.size());
        for (std::size_t i = 0; i < n; ++i) {
            const double d = ref.energies[i] - num.energies[i];
            worst = std::max(worst, std::abs(d));
            std::snprintf(buf, sizeof buf, "%zu,%.10f,%.10f,%+.3e\n", i, ref.energies[i], num.energies[i], d);
            report << buf;
        }
        const bool counts_match = ref.size() == num.size();
        const bool pass = counts_match && !(worst > tol);
        std::snprintf(buf, sizeof buf, "# count engine=%zu numerov=%zu  max|delta|=%.3e eV  tol=%.1e  %s\n",
                      ref.size(), num.size(), worst, tol, pass ? "PASS" : "FAIL");
        report << buf;
        ok = ok && pass;
    }
    write_output(o.out, report.str());
    return ok ? kOk : kSolver;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"qcap: bound states and zero-temperature quantum capacitance of 1D wells"};
    app.require_subcommand(1);
    std::string config_file;
    app.add_option("--config", config_file, "JSON config file (default: $QCAP_CONFIG)");

    Options o;
    auto* levels = app.add_subcommand("levels", "bound-state energies as JSON or CSV");
    auto* cq = app.add_subcommand("cq", "quantum capacitance staircase C_q(lg n) as CSV or JSON");
    auto* figure = app.add_subcommand("figure", "shorthand for 'cq --figure N'");
    auto* cross = app.add_subcommand("crosscheck", "compare the default engine against the Numerov oracle");
    for (auto* cmd : {levels, cq, figure, cross}) {
        add_common(*cmd, o);
        cmd->add_option("--config", config_file, "JSON config file (default: $QCAP_CONFIG)");
    }
    for (auto* cmd : {levels, cq, figure})
        cmd->add_option("--engine", o.engine, "auto|numerov|determinant")
            ->check(CLI::IsMember({"auto", "numerov", "determinant"}));
    for (auto* cmd : {cq, figure}) {
        cmd->add_option("--lg-min", o.lg_min, "lower end of the lg(n / cm^-2) grid");
        cmd->add_option("--lg-max", o.lg_max, "upper end of the lg(n / cm^-2) grid");
        cmd->add_option("--points", o.points, "number of grid points");
    }
    cross->add_option("--check-tol", o.check_tol, "tolerance in eV (default 1e-6, staircase 1e-4)");
    int figure_number = 0;
    figure->add_option("number", figure_number, "figure 1..6")->check(CLI::Range(1, 6));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    CLI::App* active = app.get_subcommands().front();
    try {
        if (config_file.empty())
            if (const char* env = std::getenv("QCAP_CONFIG"); env && *env)
                config_file = env;
        if (!config_file.empty())
            apply_config(parse_json_text(read_file(config_file), config_file), *active, o);
        if (active == figure) {
            if (figure_number != 0)
                o.figure = figure_number;
            if (o.figure == 0)
                throw UsageError("figure: missing figure number");
        }
        if (o.figure < 0 || o.figure > 6)
            throw UsageError("--figure must be 1..6");

        if (active == levels)
            return cmd_levels(o);
        if (active == cross)
            return cmd_crosscheck(o);
        return cmd_cq(o);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << active->help();
        return kUsage;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kSolver;
    }
}
