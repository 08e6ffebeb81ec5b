// Experiment registry: every runnable protocol, its schema, and its outputs.

#include <cmath>
#include <sstream>

#include "rotorlab/anderson.hpp"
#include "rotorlab/classical.hpp"
#include "rotorlab/coupled.hpp"
#include "rotorlab/diagnostics.hpp"
#include "rotorlab/harness.hpp"
#include "rotorlab/kepler.hpp"
#include "rotorlab/nonhermitian.hpp"
#include "rotorlab/pseudoclassical.hpp"
#include "rotorlab/quantum.hpp"
#include "rotorlab/topology.hpp"

namespace rotorlab::harness {

namespace {

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

void classical_diffusion(const ResolvedConfig& cfg, RunContext& ctx) {
    const double K = cfg.get_double("K");
    const long n_traj = cfg.get_int("n_traj");
    const long steps = cfg.get_int("steps");
    auto pot = classical::KickPotential::cosine(K);
    auto ens = classical::make_uniform_theta_ensemble(static_cast<std::size_t>(n_traj),
                                                      cfg.get_double("J0"), cfg.seed());
    auto res = classical::evolve_ensemble(ens, pot, steps);
    ctx.write_series("series.tsv", "series", res.series);

    double t0 = cfg.get_double("fit_t0");
    double t1 = cfg.get_double("fit_t1");
    if (t1 < 0) t1 = static_cast<double>(steps);
    auto fit = classical::diffusion_coefficient(res.series, t0, t1);
    ctx.diag("D", fit.D);
    ctx.diag("D_sigma", fit.sigma);
    const double theory = 0.5 * K * K * (1.0 - std::cyl_bessel_j(2.0, K));
    ctx.diag("D_theory", theory);
    ctx.diag("D_ratio", fit.D / theory);
}

void classical_lyapunov(const ResolvedConfig& cfg, RunContext& ctx) {
    const double K = cfg.get_double("K");
    auto pot = classical::KickPotential::cosine(K);
    auto res = classical::max_lyapunov(pot, {cfg.get_double("theta0"), cfg.get_double("J0")},
                                       cfg.get_int("steps"), cfg.get_int("transient"));
    ctx.diag("lambda", res.lambda);
    ctx.diag("lambda_stderr", res.std_error);
    ctx.diag("lambda_theory", std::log(K / 2.0));
    ctx.diag("chaotic", res.chaotic ? 1.0 : 0.0);
}

void qkr_localization(const ResolvedConfig& cfg, RunContext& ctx) {
    const double k = cfg.get_double("k");
    const Period T = cfg.get_period("T");
    const int L = static_cast<int>(cfg.get_int("L"));
    const long steps = cfg.get_int("steps");
    quantum::FloquetSpec spec;
    spec.T = T;
    spec.potential = classical::KickPotential::cosine(k);

    quantum::RotorState s;
    if (cfg.get_string("init") == "delta")
        s = quantum::init_delta(L, 0);
    else
        s = quantum::init_gaussian(L, 0.0, 1.0 / std::sqrt(T.value()));

    quantum::FloquetEngine engine(spec, L);
    auto res = engine.evolve(s, steps, cfg.get_int("record_every"), cfg.get_int("avg_dist_from"));
    ctx.write_series("series.tsv", "series", res.series);
    if (res.first_spill) ctx.warn("spill at t = " + std::to_string(*res.first_spill));

    std::vector<double> m(res.avg_dist.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        m[i] = static_cast<double>(static_cast<long>(i) - L);
    ctx.write_table("distribution.tsv", "distribution", {"m", "prob"}, {&m, &res.avg_dist});

    auto loc = diagnostics::fit_localization_length(res.avg_dist, -L, 0.0);
    ctx.diag("ell", loc.ell);
    ctx.diag("ell_sigma", loc.sigma);
    ctx.diag("ell_r2", loc.r2);
    ctx.diag("ell_pred", 0.5 * k * k);
    auto sat = diagnostics::saturation_time(res.series, "energy");
    if (sat) ctx.diag("saturation_t", *sat);
}

void resonance(const ResolvedConfig& cfg, RunContext& ctx) {
    const double k = cfg.get_double("k");
    const int L = static_cast<int>(cfg.get_int("L"));
    quantum::FloquetSpec spec;
    spec.T = cfg.get_period("T");
    spec.potential = classical::KickPotential::cosine(k);
    quantum::RotorState s = quantum::init_delta(L, 0);
    auto res = quantum::evolve(s, spec, cfg.get_int("steps"));
    ctx.write_series("series.tsv", "series", res.series);
    double worst = 0.0;
    const auto& E = res.series.col("energy");
    for (std::size_t i = 1; i < res.series.t.size(); ++i) {
        const double t = res.series.t[i];
        const double expect = 0.25 * k * k * t * t;
        worst = std::max(worst, std::abs(E[i] - expect) / expect);
    }
    ctx.diag("max_rel_energy_error", worst);
}

void antiresonance(const ResolvedConfig& cfg, RunContext& ctx) {
    const int L = static_cast<int>(cfg.get_int("L"));
    quantum::FloquetSpec spec;
    spec.T = cfg.get_period("T");
    spec.potential = classical::KickPotential::cosine(cfg.get_double("k"));
    quantum::RotorState s = quantum::init_gaussian(L, 0.0, 2.0);
    const quantum::RotorState initial = s;
    quantum::FloquetEngine engine(spec, L);
    auto res = engine.evolve(s, 2 * cfg.get_int("periods"));
    ctx.write_series("series.tsv", "series", res.series);
    double err = 0.0;
    for (std::size_t i = 0; i < s.amps.size(); ++i)
        err = std::max(err, std::abs(s.amps[i] - initial.amps[i]));
    ctx.diag("recurrence_error", err);
}

void anderson_bridge(const ResolvedConfig& cfg, RunContext& ctx) {
    const double k = cfg.get_double("k");
    const Period T = cfg.get_period("T");
    auto pot = classical::KickPotential::cosine(k);
    int l_max = static_cast<int>(cfg.get_int("l_max"));
    if (l_max == 0) l_max = std::max(static_cast<int>(std::ceil(4 * k)), 16);
    auto chain = anderson::build_chain(T, cfg.get_double("eps"), pot, cfg.get_int("n_sites"),
                                       l_max, 16 * l_max);

    std::vector<double> n(chain.W.size());
    for (std::size_t i = 0; i < n.size(); ++i)
        n[i] = static_cast<double>(chain.n_min + static_cast<long>(i));
    ctx.write_table("chain_sites.tsv", "chain-sites", {"n", "W"}, {&n, &chain.W});
    std::vector<double> l(chain.t.size()), re(chain.t.size()), im(chain.t.size());
    for (std::size_t i = 0; i < chain.t.size(); ++i) {
        l[i] = static_cast<double>(static_cast<long>(i) - chain.l_max);
        re[i] = chain.t[i].real();
        im[i] = chain.t[i].imag();
    }
    ctx.write_table("chain_hoppings.tsv", "chain-hoppings", {"l", "re_t", "im_t"},
                    {&l, &re, &im});
    ctx.diag("E_ref", chain.E);
    ctx.diag("truncated_weight", chain.truncated_weight);

    const auto method = cfg.get_string("method") == "transfer_matrix_nn"
                            ? anderson::TbMethod::TransferMatrixNN
                            : anderson::TbMethod::EigvecDecay;
    auto tb = anderson::tb_localization_length(chain, chain.E, method);
    ctx.diag("ell_tb", tb.ell);
    ctx.diag("ell_tb_r2", tb.r2);

    if (cfg.get_bool("compare_dynamical")) {
        const int L = static_cast<int>(cfg.get_int("dyn_L"));
        quantum::FloquetSpec spec;
        spec.T = T;
        spec.potential = pot;
        quantum::RotorState s = quantum::init_delta(L, 0);
        quantum::FloquetEngine engine(spec, L);
        const long steps = cfg.get_int("dyn_steps");
        auto res = engine.evolve(s, steps, 10, steps / 2);
        auto loc = diagnostics::fit_localization_length(res.avg_dist, -L, 0.0);
        ctx.diag("ell_dyn", loc.ell);
        // intensity vs amplitude decay: ell_dyn = 2 * ell_eig
        ctx.diag("ell_ratio", loc.ell / (2.0 * tb.ell));
    }
}

void pseudoclassical_dkr(const ResolvedConfig& cfg, RunContext& ctx) {
    const double K = cfg.get_double("K");
    auto fp = pseudoclassical::fixed_point_analysis(K);
    ctx.diag("lambda_numeric", fp.lambda_numeric);
    ctx.diag("lambda_paper", fp.lambda_paper);
    ctx.diag("lambda_discrepancy", fp.discrepancy);
    ctx.diag_text("lambda_note",
                  "closed-form and numerical Jacobian exponents disagree; predictions use "
                  "the numerical value");

    const auto deltas = parse_list(cfg.get_string("deltas"));
    const long steps = cfg.get_int("steps");
    const std::size_t n_traj = static_cast<std::size_t>(cfg.get_int("n_traj"));
    int idx = 0;
    for (double delta : deltas) {
        auto series = pseudoclassical::dkr_exponential_run(K, delta, n_traj, steps, cfg.seed());
        ctx.write_series("series_delta" + std::to_string(idx) + ".tsv", "dk-series", series);
        ctx.diag("t_exp_pred_delta" + std::to_string(idx), fp.t_exp(delta));
        ++idx;
    }
}

void gauss_sums_exp(const ResolvedConfig& cfg, RunContext& ctx) {
    auto gs = pseudoclassical::gauss_sums(static_cast<int>(cfg.get_int("r")),
                                          static_cast<int>(cfg.get_int("s")));
    std::vector<double> l(gs.G.size()), re(gs.G.size()), im(gs.G.size()), mag(gs.G.size());
    double sumsq = 0.0;
    for (std::size_t i = 0; i < gs.G.size(); ++i) {
        l[i] = static_cast<double>(i);
        re[i] = gs.G[i].real();
        im[i] = gs.G[i].imag();
        mag[i] = std::abs(gs.G[i]);
        sumsq += std::norm(gs.G[i]);
    }
    ctx.write_table("gauss_sums.tsv", "gauss-table", {"l", "re_G", "im_G", "abs_G"},
                    {&l, &re, &im, &mag});
    ctx.diag("n_bands", gs.n_bands());
    ctx.diag("sum_sq", sumsq);
}

void chern_scan(const ResolvedConfig& cfg, RunContext& ctx) {
    const int r = static_cast<int>(cfg.get_int("r"));
    const int s = static_cast<int>(cfg.get_int("s"));
    const int mesh = static_cast<int>(cfg.get_int("mesh"));
    const auto ks = parse_list(cfg.get_string("k_values"));
    std::vector<double> col_k, col_band, col_cl, col_cq, col_gap;
    for (double k : ks) {
        topology::ResonantDKRSpec spec(r, s, k);
        topology::ReducedFloquet rf(spec);
        auto grid = topology::band_spectrum(rf, mesh, mesh);
        double min_gap = 1e300;
        for (double g : grid.min_gap) min_gap = std::min(min_gap, g);
        auto cn = topology::chern_numbers(grid, rf);
        for (int b = 0; b < grid.dim; ++b) {
            col_k.push_back(k);
            col_band.push_back(b);
            col_cl.push_back(cn.lattice[static_cast<std::size_t>(b)]);
            col_cq.push_back(cn.quadrature[static_cast<std::size_t>(b)]);
            col_gap.push_back(min_gap);
        }
    }
    ctx.write_table("chern_table.tsv", "chern-table",
                    {"k", "band", "C_lattice", "C_quadrature", "min_gap"},
                    {&col_k, &col_band, &col_cl, &col_cq, &col_gap});
}

void thouless_pump_exp(const ResolvedConfig& cfg, RunContext& ctx) {
    topology::ResonantDKRSpec spec(static_cast<int>(cfg.get_int("r")),
                                   static_cast<int>(cfg.get_int("s")), cfg.get_double("k"));
    topology::ReducedFloquet rf(spec);
    auto grid = topology::band_spectrum(rf, static_cast<int>(cfg.get_int("mesh_phi")),
                                        static_cast<int>(cfg.get_int("mesh_alpha")));
    for (const auto& w : grid.warnings) ctx.warn(w);
    auto pump = topology::thouless_pump(rf, grid, static_cast<int>(cfg.get_int("band")),
                                        static_cast<int>(cfg.get_int("d_f")),
                                        static_cast<int>(cfg.get_int("L")));
    ctx.write_series("pump.tsv", "pump-series", pump.series);
    for (const auto& w : pump.warnings) ctx.warn(w);
    ctx.diag("deltaI", pump.deltaI);
    ctx.diag("chern", pump.chern);
    ctx.diag("prediction", pump.prediction);
    ctx.diag("max_leakage", pump.max_leakage);
    if (pump.prediction != 0.0)
        ctx.diag("quantization_error", std::abs(pump.deltaI - pump.prediction) /
                                           std::abs(pump.prediction));
}

void coupled_entanglement(const ResolvedConfig& cfg, RunContext& ctx) {
    coupled::CoupledSpec spec(cfg.get_double("K1"), cfg.get_double("K2"), cfg.get_double("xi"));
    const int L = static_cast<int>(cfg.get_int("L"));
    auto s = coupled::init_product_gaussian(L, L, cfg.get_double("width"),
                                            cfg.get_double("width"));
    coupled::CoupledEngine engine(spec, L, L);
    const long steps = cfg.get_int("steps");
    const long ent_every = cfg.get_int("ent_every");

    TimeSeries series;
    auto& e1 = series.add_column("E1");
    auto& e2 = series.add_column("E2");
    auto& svn = series.add_column("SvN");
    auto& slin = series.add_column("Slin");
    auto& neff = series.add_column("Neff");
    auto record = [&](long t) {
        auto marg = coupled::marginal_observables(s);
        auto ent = coupled::entanglement_measures(s);
        series.t.push_back(static_cast<double>(t));
        e1.push_back(marg.E1);
        e2.push_back(marg.E2);
        svn.push_back(ent.SvN);
        slin.push_back(ent.Slin);
        neff.push_back(ent.Neff);
    };
    record(0);
    for (long t = 1; t <= steps; ++t) {
        engine.step(s);
        if (t % ent_every == 0 || t == steps) record(t);
    }
    if (s.spill1 || s.spill2) ctx.warn("edge spill on a rotor axis; grow L");
    ctx.write_series("entanglement.tsv", "entanglement-series", series);
}

void nh_spectrum_exp(const ResolvedConfig& cfg, RunContext& ctx) {
    const double k = cfg.get_double("k");
    const Period T = cfg.get_period("T");
    const int L = static_cast<int>(cfg.get_int("L"));
    auto sp = nonhermitian::nh_floquet_spectrum(k, T, cfg.get_double("gamma"), L,
                                                cfg.get_bool("check_truncation"));
    ctx.write_table("spectrum.tsv", "spectrum", {"re_eps", "log_abs_lambda"},
                    {&sp.re_eps, &sp.log_abs});
    ctx.diag("max_log_abs", sp.max_log_abs);
    ctx.diag("mean_abs_log", sp.mean_abs_log);
    ctx.diag("mean_pos_log", sp.mean_pos_log);
    ctx.diag("indicator_shift", sp.indicator_shift);
    ctx.diag("eigenvalue_shift", sp.eigenvalue_shift);

    if (cfg.get_bool("scan")) {
        auto grid = parse_list(cfg.get_string("gamma_grid"));
        auto th = nonhermitian::pt_threshold(k, T, L, grid);
        if (th.gamma_PT) ctx.diag("gamma_PT", *th.gamma_PT);
        ctx.diag("xi_L", th.xi_L);
        ctx.diag("gamma_PT_theory", th.theory);
    }
}

void nh_ratchet(const ResolvedConfig& cfg, RunContext& ctx) {
    try {
        auto fit = nonhermitian::ratchet_velocity(cfg.get_double("k"), cfg.get_period("T"),
                                                  cfg.get_double("gamma"), cfg.get_int("steps"),
                                                  static_cast<int>(cfg.get_int("L")));
        ctx.write_series("series.tsv", "series", fit.series);
        ctx.diag("v", fit.v);
        ctx.diag("r2", fit.r2);
    } catch (const NoRatchetError& e) {
        ctx.warn(e.what());
        ctx.diag_text("outcome", "no-ratchet");
        return;
    }
}

void kepler_threshold(const ResolvedConfig& cfg, RunContext& ctx) {
    const double omega0 = cfg.get_double("omega0");
    const double n0 = cfg.get_double("n0");
    auto params = kepler::MicrowaveParams::from_scaled(cfg.get_double("eps0"), omega0, n0);
    auto b = kepler::borders(params);
    ctx.diag("eps0_classical", b.eps0_classical);
    ctx.diag("eps0_quantum", b.eps0_quantum);
    ctx.diag("ratio_ell_NI", b.ratio_ell_NI);

    const long kicks = cfg.get_int("kicks");
    const std::size_t n_traj = static_cast<std::size_t>(cfg.get_int("n_traj"));
    auto curve = kepler::ionization_probability(params, n_traj, kicks, cfg.seed());
    ctx.write_series("ionization.tsv", "series", curve.series);
    ctx.diag("final_fraction", curve.final_fraction);

    if (cfg.get_bool("find_threshold")) {
        const double eps =
            kepler::ionization_threshold_eps0(omega0, n0, cfg.get_double("fraction"), kicks,
                                              n_traj, b.eps0_classical / 5.0,
                                              5.0 * b.eps0_classical, cfg.seed());
        std::vector<double> w{omega0}, et{eps}, ec{b.eps0_classical}, eq{b.eps0_quantum};
        ctx.write_table("threshold.tsv", "threshold",
                        {"omega0", "eps_threshold", "eps0c", "eps_q"}, {&w, &et, &ec, &eq});
        ctx.diag("eps_threshold", eps);
        ctx.diag("threshold_ratio", eps / b.eps0_classical);
    }
}

void quasiperiodic_transition(const ResolvedConfig& cfg, RunContext& ctx) {
    const int L = static_cast<int>(cfg.get_int("L"));
    const long steps = cfg.get_int("steps");
    auto res = quantum::quasiperiodic_run(cfg.get_double("K"), cfg.get_double("eps"),
                                          cfg.get_double("omega2"), cfg.get_double("omega3"),
                                          cfg.get_double("hbar"), L, steps);
    ctx.write_series("series.tsv", "series", res.series);
    if (res.first_spill) ctx.warn("spill at t = " + std::to_string(*res.first_spill));

    // final distribution from a fresh run tail-average
    quantum::FloquetSpec spec;
    spec.T = Period::plain(cfg.get_double("hbar"));
    spec.potential = classical::KickPotential::cosine(cfg.get_double("K") / cfg.get_double("hbar"));
    spec.modulation = quantum::Modulation{cfg.get_double("eps"), cfg.get_double("omega2"),
                                          cfg.get_double("omega3")};
    quantum::RotorState s = quantum::init_delta(L, 0);
    quantum::FloquetEngine engine(spec, L);
    auto res2 = engine.evolve(s, steps, steps, steps);
    std::vector<double> m(res2.avg_dist.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        m[i] = static_cast<double>(static_cast<long>(i) - L);
    ctx.write_table("distribution.tsv", "distribution", {"m", "prob"}, {&m, &res2.avg_dist});

    auto fit = diagnostics::fit_growth_law(res.series, "energy", 10.0,
                                           static_cast<double>(steps));
    ctx.diag_text("growth_law", diagnostics::to_string(fit.law));
    ctx.diag("growth_mu", fit.mu);
}

void qhe_energy_growth(const ResolvedConfig& cfg, RunContext& ctx) {
    quantum::QheParams p;
    p.L = static_cast<int>(cfg.get_int("L"));
    p.hbar_eff = cfg.get_double("hbar");
    const std::string wt = cfg.get_string("omega_tilde");
    p.omega_tilde = wt == "golden" ? two_pi * 0.5 * (std::sqrt(5.0) - 1.0) : std::stod(wt);
    p.theta2_samples = static_cast<int>(cfg.get_int("theta2_samples"));
    p.steps = cfg.get_int("steps");
    p.record_every = cfg.get_int("record_every");
    auto series = spinor_qhe_run(p);
    ctx.write_series("series.tsv", "series", series);
    const auto& E = series.col("energy");
    const std::size_t n = series.t.size();
    ctx.diag("E_over_t_early", E[n / 4] / series.t[n / 4]);
    ctx.diag("E_over_t_late", E[n - 1] / series.t[n - 1]);
}

void sawtooth_localization(const ResolvedConfig& cfg, RunContext& ctx) {
    const int L = static_cast<int>(cfg.get_int("L"));
    quantum::FloquetSpec spec;
    spec.T = cfg.get_period("T");
    spec.potential = classical::KickPotential::sawtooth(cfg.get_double("k"));
    quantum::RotorState s = quantum::init_delta(L, 0);
    quantum::FloquetEngine engine(spec, L);
    const long steps = cfg.get_int("steps");
    auto res = engine.evolve(s, steps, 5, steps / 2);
    ctx.write_series("series.tsv", "series", res.series);
    std::vector<double> m(res.avg_dist.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        m[i] = static_cast<double>(static_cast<long>(i) - L);
    ctx.write_table("distribution.tsv", "distribution", {"m", "prob"}, {&m, &res.avg_dist});
    auto loc = diagnostics::fit_localization_length(res.avg_dist, -L, 0.0);
    ctx.diag("ell", loc.ell);
    ctx.diag("ell_r2", loc.r2);
}

void poincare_exp(const ResolvedConfig& cfg, RunContext& ctx) {
    const double K = cfg.get_double("K");
    auto pot = classical::KickPotential::cosine(K);
    const long n_seeds = cfg.get_int("n_seeds");
    std::vector<classical::PhasePoint> seeds;
    for (long i = 0; i < n_seeds; ++i)
        seeds.push_back({two_pi * (i + 0.5) / n_seeds, -pi + two_pi * (i % 7) / 7.0});
    auto clouds = classical::poincare_section(pot, seeds, cfg.get_int("steps"));
    std::vector<double> id, th, J;
    for (const auto& c : clouds)
        for (const auto& p : c.points) {
            id.push_back(static_cast<double>(c.seed_id));
            th.push_back(p.theta);
            J.push_back(p.J);
        }
    ctx.write_table("section.tsv", "section", {"seed_id", "theta", "J"}, {&id, &th, &J});
}

} // namespace

const std::vector<ExperimentDef>& experiment_registry() {
    using PT = ParamType;
    static const std::vector<ExperimentDef> registry = {
        {"classical-diffusion",
         "standard-map momentum diffusion and its quasilinear estimate",
         {{"K", PT::Double, "10.0", "kick strength"},
          {"n_traj", PT::Int, "10000", "ensemble size"},
          {"steps", PT::Int, "1000", "map iterations"},
          {"J0", PT::Double, "0.0", "initial momentum"},
          {"fit_t0", PT::Double, "50", "fit window start"},
          {"fit_t1", PT::Double, "-1", "fit window end (-1: all)"}},
         classical_diffusion},
        {"classical-lyapunov",
         "maximum Lyapunov exponent by tangent-vector iteration",
         {{"K", PT::Double, "10.0", "kick strength"},
          {"theta0", PT::Double, "1.0", "initial angle"},
          {"J0", PT::Double, "0.3", "initial momentum"},
          {"steps", PT::Int, "200000", "iterations"},
          {"transient", PT::Int, "1000", "discarded transient"}},
         classical_lyapunov},
        {"qkr-localization",
         "dynamical localization of the quantum kicked rotor",
         {{"k", PT::Double, "20.0", "kick strength"},
          {"T", PT::PeriodT, "0.25", "kick period"},
          {"L", PT::Int, "8192", "truncation half-width"},
          {"steps", PT::Int, "3000", "kicks"},
          {"record_every", PT::Int, "10", "series cadence"},
          {"avg_dist_from", PT::Int, "2000", "tail-average start"},
          {"init", PT::String, "gaussian", "gaussian | delta"}},
         qkr_localization},
        {"resonance",
         "quadratic energy growth at the principal resonance T = 4 pi",
         {{"k", PT::Double, "3.0", "kick strength"},
          {"T", PT::PeriodT, "4pi", "kick period"},
          {"L", PT::Int, "512", "truncation half-width"},
          {"steps", PT::Int, "50", "kicks"}},
         resonance},
        {"antiresonance",
         "period-2 exact recurrence at T = 2 pi",
         {{"k", PT::Double, "5.0", "kick strength"},
          {"T", PT::PeriodT, "2pi", "kick period"},
          {"L", PT::Int, "64", "truncation half-width"},
          {"periods", PT::Int, "1", "number of 2-step cycles"}},
         antiresonance},
        {"anderson-bridge",
         "tight-binding mapping: site energies, hoppings, localization",
         {{"k", PT::Double, "3.0", "kick strength"},
          {"T", PT::PeriodT, "2.0", "kick period"},
          {"eps", PT::Double, "0.0", "quasienergy"},
          {"n_sites", PT::Int, "501", "chain length"},
          {"l_max", PT::Int, "0", "hopping cutoff (0: max(4k,16))"},
          {"method", PT::String, "eigvec_decay", "eigvec_decay | transfer_matrix_nn"},
          {"compare_dynamical", PT::Bool, "true", "also fit the dynamical ell"},
          {"dyn_L", PT::Int, "512", "lattice for the dynamical run"},
          {"dyn_steps", PT::Int, "2000", "kicks for the dynamical run"}},
         anderson_bridge},
        {"pseudoclassical-dkr",
         "double-kicked-rotor exponential spreading in the epsilon-classical map",
         {{"K", PT::Double, "0.005", "pseudoclassical kick strength"},
          {"deltas", PT::String, "0.1,0.01,0.001", "detunings"},
          {"n_traj", PT::Int, "10000", "ensemble size"},
          {"steps", PT::Int, "3000", "map iterations"}},
         pseudoclassical_dkr},
        {"gauss-sums",
         "quasienergy band decomposition of a high-order resonance",
         {{"r", PT::Int, "1", "resonance numerator"},
          {"s", PT::Int, "3", "resonance denominator"}},
         gauss_sums_exp},
        {"chern-scan",
         "Chern numbers of the resonant double kicked rotor vs kick strength",
         {{"r", PT::Int, "1", "resonance numerator"},
          {"s", PT::Int, "3", "resonance denominator"},
          {"k_values", PT::String, "0.5,1.0,1.5,2.0,2.5,3.0,3.5,4.0,4.5,5.0", "kick strengths"},
          {"mesh", PT::Int, "24", "phi x alpha mesh"}},
         chern_scan},
        {"thouless-pump",
         "quantized adiabatic momentum transport over one alpha cycle",
         {{"r", PT::Int, "1", "resonance numerator"},
          {"s", PT::Int, "3", "resonance denominator"},
          {"k", PT::Double, "2.0", "kick strength"},
          {"band", PT::Int, "0", "band index"},
          {"d_f", PT::Int, "1000", "steps per cycle"},
          {"L", PT::Int, "256", "lattice half-width"},
          {"mesh_phi", PT::Int, "48", "phi mesh"},
          {"mesh_alpha", PT::Int, "48", "alpha mesh"}},
         thouless_pump_exp},
        {"coupled-entanglement",
         "two coupled rotors: energies and entanglement growth",
         {{"K1", PT::Double, "9.0", "kick strength 1"},
          {"K2", PT::Double, "10.0", "kick strength 2"},
          {"xi", PT::Double, "0.1", "coupling"},
          {"L", PT::Int, "512", "lattice half-width per rotor"},
          {"steps", PT::Int, "1000", "kicks"},
          {"ent_every", PT::Int, "20", "entanglement cadence"},
          {"width", PT::Double, "1.0", "initial packet width"}},
         coupled_entanglement},
        {"nh-spectrum",
         "PT kicked rotor quasienergy spectrum and threshold scan",
         {{"k", PT::Double, "3.0", "kick strength"},
          {"T", PT::PeriodT, "1.4", "kick period"},
          {"gamma", PT::Double, "0.02", "gain-loss amplitude"},
          {"L", PT::Int, "128", "truncation half-width"},
          {"check_truncation", PT::Bool, "true", "L -> L+64 stability check"},
          {"scan", PT::Bool, "false", "bisect the PT threshold"},
          {"gamma_grid", PT::String, "0.001,0.01,0.05,0.1,0.2,0.4,0.6", "scan grid"}},
         nh_spectrum_exp},
        {"nh-ratchet",
         "gain-selected ratchet transport at quantum resonance",
         {{"k", PT::Double, "3.0", "kick strength"},
          {"T", PT::PeriodT, "pi/3", "kick period"},
          {"gamma", PT::Double, "0.033333333333333333", "gain-loss amplitude"},
          {"steps", PT::Int, "400", "kicks"},
          {"L", PT::Int, "1024", "truncation half-width"}},
         nh_ratchet},
        {"kepler-threshold",
         "microwave ionization borders of the Kepler map",
         {{"omega0", PT::Double, "2.0", "scaled frequency"},
          {"n0", PT::Double, "60.0", "initial principal action"},
          {"eps0", PT::Double, "0.02", "scaled field for the single curve"},
          {"n_traj", PT::Int, "2000", "ensemble size"},
          {"kicks", PT::Int, "1000", "map iterations"},
          {"fraction", PT::Double, "0.1", "threshold ionization fraction"},
          {"find_threshold", PT::Bool, "true", "bisect the threshold field"}},
         kepler_threshold},
        {"quasiperiodic-transition",
         "quasiperiodic kicked rotor: localized vs diffusive phases",
         {{"K", PT::Double, "4.0", "kick strength"},
          {"eps", PT::Double, "0.3", "modulation amplitude"},
          {"omega2", PT::Double, "14.049629462081452", "2*pi*sqrt(5)"},
          {"omega3", PT::Double, "22.654094725071098", "2*pi*sqrt(13)"},
          {"hbar", PT::Double, "2.89", "effective Planck constant"},
          {"L", PT::Int, "2048", "truncation half-width"},
          {"steps", PT::Int, "1000", "kicks"}},
         quasiperiodic_transition},
        {"qhe-energy-growth",
         "spin-1/2 quasiperiodic rotor energy growth rate",
         {{"hbar", PT::Double, "1.0", "effective Planck constant"},
          {"omega_tilde", PT::String, "golden", "drive frequency or 'golden'"},
          {"theta2_samples", PT::Int, "8", "phase average samples"},
          {"L", PT::Int, "256", "truncation half-width"},
          {"steps", PT::Int, "300", "kicks"},
          {"record_every", PT::Int, "1", "series cadence"}},
         qhe_energy_growth},
        {"sawtooth-localization",
         "quantum sawtooth map localization",
         {{"k", PT::Double, "0.273", "kick strength"},
          {"T", PT::PeriodT, "5.4945054945054945", "kick period (K = kT)"},
          {"L", PT::Int, "256", "truncation half-width"},
          {"steps", PT::Int, "500", "kicks"}},
         sawtooth_localization},
        {"poincare-section",
         "stroboscopic phase-space portrait of the standard map",
         {{"K", PT::Double, "0.5", "kick strength"},
          {"n_seeds", PT::Int, "20", "trajectory seeds"},
          {"steps", PT::Int, "400", "iterations per seed"}},
         poincare_exp},
    };
    return registry;
}

} // namespace rotorlab::harness
