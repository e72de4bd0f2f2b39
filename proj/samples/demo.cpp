// Levels and capacitance steps of the 5 nm / 2 nm / 5 nm double well at 10 eV.
#include <cstdio>

#include <qcap/qcap.hpp>

int main()
{
    const qcap::Material m(0.1);
    const auto profile = qcap::make_double_rect_well(5.0, 2.0, 10.0);
    const auto spectrum = qcap::bound_states(profile, m);

    const auto grid = qcap::capacitance::log_density_grid();
    const auto curve = qcap::capacitance::capacitance_vs_density(spectrum, m, grid);

    std::printf("%zu bound states\n", spectrum.size());
    std::printf("%4s %14s %16s\n", "j", "E_j [eV]", "n_j [cm^-2]");
    for (std::size_t j = 0; j < spectrum.size(); ++j)
        std::printf("%4zu %14.9f %16.6e\n", j, spectrum.energies[j], curve.step_densities[j]);
    std::printf("C_q per subband: %.6f uF/cm^2\n",
                qcap::capacitance::f_per_m2_to_uf_per_cm2(qcap::capacitance::quantum_unit(m)));
}
