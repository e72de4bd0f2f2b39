#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <qcap/capacitance.hpp>

namespace qcap::testing {

struct CommandResult {
    int exit_code;
    std::string output; // stdout only
};

inline CommandResult run_command(const std::string& command)
{
    CommandResult r{-1, {}};
    FILE* pipe = ::popen(command.c_str(), "r");
    if (!pipe)
        return r;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0)
        r.output.append(buf, n);
    const int status = ::pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

inline std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Brute-force staircase: sample mu above the lowest level at geometrically
/// spaced offsets (15 decades, so steps just above the band bottom are
/// resolved as finely as the high-density ones), push each sample through n(mu)
/// and C_q(mu), and read C_q at each grid density from the first sample whose
/// density reaches it. Shares no code with the closed-form inversion.
inline std::vector<double> mu_sweep_staircase(const BoundSpectrum& s, const Material& m,
                                              const std::vector<double>& n_grid_cm2,
                                              std::size_t samples = 1'000'000)
{
    const double n_max = n_grid_cm2.back() / constants::per_m2_to_per_cm2;
    const double lo = *std::min_element(s.energies.begin(), s.energies.end());
    double hi = lo + 1.0;
    while (capacitance::concentration(hi, s, m) < n_max)
        hi = lo + 2.0 * (hi - lo);

    std::vector<double> mu_n(samples), mu_c(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        const double frac = static_cast<double>(i + 1) / static_cast<double>(samples);
        const double mu = lo + (hi - lo) * std::pow(10.0, -15.0 * (1.0 - frac));
        mu_n[i] = capacitance::concentration(mu, s, m) * constants::per_m2_to_per_cm2;
        mu_c[i] = capacitance::capacitance_at_mu(mu, s, m);
    }
    std::vector<double> out;
    out.reserve(n_grid_cm2.size());
    for (double n : n_grid_cm2) {
        const auto it = std::lower_bound(mu_n.begin(), mu_n.end(), n);
        out.push_back(mu_c[static_cast<std::size_t>(it - mu_n.begin())]);
    }
    return out;
}

} // namespace qcap::testing
