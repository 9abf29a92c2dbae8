#pragma once

#include <filesystem>
#include <functional>
#include <iostream>
#include <map>

#include "casq/config.hpp"
#include "casq/csv.hpp"
#include "casq/verification.hpp"

namespace casq {

namespace detail {

inline std::string default_output_name(const RunConfig& cfg) {
    switch (cfg.command) {
        case Command::coeffs: return "coeffs.csv";
        case Command::variance: return "variance.csv";
        case Command::spectrum: return "spectrum.csv";
        case Command::photon: return "photon.csv";
        case Command::power: return "power.csv";
        case Command::mc: return "mc.csv";
        case Command::oracle: return "oracle.csv";
        case Command::figure: return cfg.figure_id + ".csv";
        case Command::sweep: return "sweep.csv";
        case Command::report: return "report.txt";
    }
    return "out.csv";
}

inline std::string params_comment(const SystemParams& p) {
    std::ostringstream os;
    os.precision(17);
    os << "A=" << p.linear_gain << " kappa=" << p.kappa << " beta=" << p.beta
       << " epsilon=" << p.epsilon << " r=" << p.squeeze_r;
    return os.str();
}

inline int run_coeffs(const RunConfig& cfg, const std::filesystem::path& out) {
    const SystemParams p = resolved_params(cfg);
    const DerivedCoefficients c = derive_coefficients(p);
    CsvTable t;
    t.comments = {"derived master-equation coefficients", params_comment(p)};
    t.header = {"cal_a", "cal_b", "cal_c", "cal_d", "big_b", "N", "M",
                "lambda_minus", "lambda_plus", "epsilon_threshold"};
    t.rows = {{c.cal_a, c.cal_b, c.cal_c, c.cal_d, c.big_b, c.res_n, c.res_m, c.lambda_minus,
               c.lambda_plus, c.epsilon_threshold}};
    t.footers = {std::string("stability: ") + to_string(stability_classify(p))};
    emit_csv(t, out);
    return 0;
}

inline int run_variance(const RunConfig& cfg, const std::filesystem::path& out) {
    const SystemParams p = resolved_params(cfg);
    const QuadraturePair cav = cavity_variances(p);
    const QuadraturePair outp = output_variances(p);
    CsvTable t;
    t.comments = {"steady-state quadrature variances", params_comment(p)};
    t.header = {"cavity_plus", "cavity_minus", "output_plus", "output_minus"};
    t.rows = {{cav.plus, cav.minus, outp.plus, outp.minus}};
    if (cav.plus_divergent)
        t.footers.push_back("diverges: plus quadrature at threshold");
    emit_csv(t, out);
    return 0;
}

inline int run_spectrum(const RunConfig& cfg, const std::filesystem::path& out) {
    const SystemParams p = resolved_params(cfg);
    const auto grid = linspace(cfg.omega.min, cfg.omega.max, cfg.omega.points);
    const auto [sp, sm] = squeezing_spectrum_output(p, grid);
    CsvTable t;
    t.comments = {"output-mode squeezing spectrum", params_comment(p)};
    t.header = {"omega", "s_plus", "s_minus"};
    for (std::size_t i = 0; i < grid.size(); ++i)
        t.rows.push_back({grid[i], sp.values[i], sm.values[i]});
    if (sp.divergent_index)
        t.footers.push_back("diverges: plus spectrum at omega=0 at threshold");
    emit_csv(t, out);
    return 0;
}

inline int run_photon(const RunConfig& cfg, const std::filesystem::path& out) {
    const SystemParams p = resolved_params(cfg);
    const DerivedCoefficients c = derive_coefficients(p);
    const double t_end = cfg.t_end > 0.0 ? cfg.t_end
                                         : (stability_classify(p) == Stability::below
                                                ? 10.0 / c.lambda_minus
                                                : 10.0 / p.kappa);
    const auto grid = linspace(0.0, t_end, cfg.t_points);
    CsvTable t;
    t.comments = {"mean photon number vs time from vacuum", params_comment(p)};
    if (stability_classify(p) == Stability::below) {
        std::ostringstream os;
        os.precision(17);
        os << "steady state: cavity=" << mean_photon_cavity_steady(p);
        if (p.kappa <= 1.0) os << " output=" << mean_photon_output_steady(p);
        t.comments.push_back(os.str());
    }
    const bool with_output = p.kappa <= 1.0;
    t.header = with_output ? std::vector<std::string>{"t", "nbar_cavity", "nbar_output"}
                           : std::vector<std::string>{"t", "nbar_cavity"};
    for (double tt : grid) {
        if (with_output)
            t.rows.push_back({tt, mean_photon_cavity(p, tt), mean_photon_output(p, tt)});
        else
            t.rows.push_back({tt, mean_photon_cavity(p, tt)});
    }
    emit_csv(t, out);
    return 0;
}

inline int run_power(const RunConfig& cfg, const std::filesystem::path& out) {
    const SystemParams p = resolved_params(cfg);
    const auto grid = linspace(cfg.omega.min, cfg.omega.max, cfg.omega.points);
    CsvTable t;
    t.comments = {"power spectra of the cavity and output modes", params_comment(p)};
    const bool with_output = p.kappa <= 1.0;
    t.header = with_output ? std::vector<std::string>{"omega", "s_cavity", "s_output"}
                           : std::vector<std::string>{"omega", "s_cavity"};
    for (double w : grid) {
        if (with_output)
            t.rows.push_back({w, power_spectrum_cavity_at(p, w), power_spectrum_output_at(p, w)});
        else
            t.rows.push_back({w, power_spectrum_cavity_at(p, w)});
    }
    emit_csv(t, out);
    return 0;
}

inline int run_mc(const RunConfig& cfg, const std::filesystem::path& out) {
    const SystemParams p = resolved_params(cfg);
    const DerivedCoefficients c = derive_coefficients(p);
    const double dt = cfg.mc.dt > 0.0 ? cfg.mc.dt : default_langevin_dt(p);
    const double t_end = cfg.mc.t_end > 0.0 ? cfg.mc.t_end : 20.0 / c.lambda_minus;
    const EnsembleStats es = simulate_ensemble(p, cfg.mc.n_traj, t_end, dt, cfg.mc.seed);
    CsvTable t;
    {
        std::ostringstream os;
        os << "doubled-phase-space ensemble, ntraj=" << es.n_traj << " seed=" << es.seed
           << " dt=" << format_double(dt);
        t.comments = {os.str(), params_comment(p)};
    }
    t.header = {"t",
                "re_mean_alpha", "im_mean_alpha", "se_re_mean_alpha", "se_im_mean_alpha",
                "re_alpha_sq", "im_alpha_sq", "se_re_alpha_sq", "se_im_alpha_sq",
                "re_cross_n", "im_cross_n", "se_re_cross_n", "se_im_cross_n",
                "re_quad_plus_sq", "se_re_quad_plus_sq",
                "re_quad_minus_sq", "se_re_quad_minus_sq"};
    for (std::size_t i = 0; i < es.times.size(); ++i) {
        t.rows.push_back({es.times[i],
                          es.mean_alpha[i].mean.real(), es.mean_alpha[i].mean.imag(),
                          es.mean_alpha[i].se_re, es.mean_alpha[i].se_im,
                          es.alpha_sq[i].mean.real(), es.alpha_sq[i].mean.imag(),
                          es.alpha_sq[i].se_re, es.alpha_sq[i].se_im,
                          es.cross_n[i].mean.real(), es.cross_n[i].mean.imag(),
                          es.cross_n[i].se_re, es.cross_n[i].se_im,
                          es.quad_plus_sq[i].mean.real(), es.quad_plus_sq[i].se_re,
                          es.quad_minus_sq[i].mean.real(), es.quad_minus_sq[i].se_re});
    }
    emit_csv(t, out);
    return 0;
}

inline int run_oracle(const RunConfig& cfg, const std::filesystem::path& out) {
    const SystemParams p = resolved_params(cfg);
    OracleOptions opt;
    opt.mc_n_traj = cfg.mc.n_traj;
    opt.mc_seed = cfg.mc.seed;
    const OracleSetResult r = run_oracle_set(p, opt);
    CsvTable t;
    t.comments = {"oracle agreement for one parameter set", params_comment(p)};
    t.header = {"n_closed", "n_ode", "n_fock", "fock_n_max", "n_mc", "mc_se",
                "ode_rel", "fock_rel", "mc_dev_in_se", "parseval_gap"};
    t.rows = {{r.n_closed, r.n_ode, r.n_fock, static_cast<double>(r.fock_n_max), r.n_mc, r.mc_se,
               r.ode_rel, r.fock_rel, r.mc_dev_in_se, r.parseval_gap}};
    const bool ok = r.ode_ok && r.fock_ok && r.mc_ok && r.parseval_ok;
    t.footers = {std::string("agreement: ") + (ok ? "pass" : "fail")};
    emit_csv(t, out);
    std::cout << (ok ? "oracle agreement: pass" : "oracle agreement: fail") << "\n";
    return ok ? 0 : 1;
}

// --- figure reproduction ------------------------------------------------

inline SystemParams figure_base(double a_gain, double kappa, double beta, double r, double eps) {
    SystemParams p;
    p.linear_gain = a_gain;
    p.kappa = kappa;
    p.beta = beta;
    p.squeeze_r = r;
    p.epsilon = eps;
    return p;
}

constexpr int kFigureAxisPoints = 400;

inline double cavity_minus_at_threshold(SystemParams p, double beta) {
    p.beta = beta;
    p.epsilon = threshold_epsilon(p);
    return cavity_variances(p).minus;
}

inline double cavity_minus_no_amplifier(SystemParams p, double beta) {
    p.beta = beta;
    p.epsilon = 0.0;
    return cavity_variances(p).minus;
}

inline int run_figure(const RunConfig& cfg, const std::filesystem::path& out) {
    const std::string& id = cfg.figure_id;
    CsvTable t;
    const auto beta_axis = linspace(0.0, 0.5, kFigureAxisPoints);
    const auto r_axis = linspace(0.0, 2.0, kFigureAxisPoints);

    if (id == "fig2") {
        t.comments = {"cavity minus-quadrature variance at threshold vs beta and r",
                      "kappa=0.8 A=100; beta in [0,0.5], r in [0,2], 400 points per axis"};
        t.header = {"beta", "r", "variance"};
        SystemParams base = figure_base(100.0, 0.8, 0.0, 0.0, 0.0);
        for (double b : beta_axis)
            for (double r : r_axis) {
                base.squeeze_r = r;
                t.rows.push_back({b, r, cavity_minus_at_threshold(base, b)});
            }
    } else if (id == "fig3") {
        t.comments = {"cavity minus-quadrature variance vs beta",
                      "kappa=0.8 A=100; r=0 eps=0 / r=0 at threshold / r=1 at threshold",
                      "beta in [0,0.5], 400 points"};
        t.header = {"beta", "var_r0_eps0", "var_r0_threshold", "var_r1_threshold"};
        SystemParams r0 = figure_base(100.0, 0.8, 0.0, 0.0, 0.0);
        SystemParams r1 = figure_base(100.0, 0.8, 0.0, 1.0, 0.0);
        for (double b : beta_axis)
            t.rows.push_back({b, cavity_minus_no_amplifier(r0, b),
                              cavity_minus_at_threshold(r0, b), cavity_minus_at_threshold(r1, b)});
    } else if (id == "fig4") {
        t.comments = {"cavity minus-quadrature variance without the amplifier vs r and beta",
                      "kappa=0.8 A=100 eps=0; r in [0,2], beta in [0,0.5], 400 points per axis"};
        t.header = {"r", "beta", "variance"};
        SystemParams base = figure_base(100.0, 0.8, 0.0, 0.0, 0.0);
        for (double r : r_axis)
            for (double b : beta_axis) {
                base.squeeze_r = r;
                t.rows.push_back({r, b, cavity_minus_no_amplifier(base, b)});
            }
    } else if (id == "fig5") {
        t.comments = {"cavity minus-quadrature variance without the amplifier vs beta",
                      "kappa=0.8 A=100 eps=0; r=0 and r=1; beta in [0,0.5], 400 points"};
        t.header = {"beta", "var_r0", "var_r1"};
        SystemParams r0 = figure_base(100.0, 0.8, 0.0, 0.0, 0.0);
        SystemParams r1 = figure_base(100.0, 0.8, 0.0, 1.0, 0.0);
        for (double b : beta_axis)
            t.rows.push_back(
                {b, cavity_minus_no_amplifier(r0, b), cavity_minus_no_amplifier(r1, b)});
    } else if (id == "fig6") {
        t.comments = {"output vs cavity minus-quadrature variance at threshold",
                      "kappa=0.8 A=100 r=1; beta in [0,0.5], 400 points"};
        t.header = {"beta", "output_variance", "cavity_variance"};
        SystemParams base = figure_base(100.0, 0.8, 0.0, 1.0, 0.0);
        for (double b : beta_axis) {
            SystemParams p = base;
            p.beta = b;
            p.epsilon = threshold_epsilon(p);
            t.rows.push_back({b, output_variances(p).minus, cavity_variances(p).minus});
        }
    } else if (id == "fig7") {
        t.comments = {"output vs cavity minus-quadrature variance without the amplifier",
                      "kappa=0.8 A=100 r=1 eps=0; beta in [0,0.5], 400 points"};
        t.header = {"beta", "output_variance", "cavity_variance"};
        SystemParams base = figure_base(100.0, 0.8, 0.0, 1.0, 0.0);
        for (double b : beta_axis) {
            SystemParams p = base;
            p.beta = b;
            t.rows.push_back({b, output_variances(p).minus, cavity_variances(p).minus});
        }
    } else if (id == "fig8") {
        t.comments = {"output squeezing spectrum (minus quadrature) at threshold vs beta and omega",
                      "kappa=0.8 A=100 r=1 (caption leaves r unstated; r=1 recorded here)",
                      "beta in [0,0.5], omega in [0,10], 400 points per axis"};
        t.header = {"beta", "omega", "s_minus"};
        const auto omega_axis = linspace(0.0, 10.0, kFigureAxisPoints);
        SystemParams base = figure_base(100.0, 0.8, 0.0, 1.0, 0.0);
        for (double b : beta_axis) {
            SystemParams p = base;
            p.beta = b;
            p.epsilon = threshold_epsilon(p);
            for (double w : omega_axis)
                t.rows.push_back({b, w, squeezing_s_minus_at(p, w)});
        }
    } else if (id == "fig9" || id == "fig10") {
        const bool at_th = id == "fig9";
        t.comments = {std::string("output squeezing spectrum at omega=0 vs beta, ") +
                          (at_th ? "at threshold" : "without the amplifier (eps=0)"),
                      "kappa=0.8 A=100; r in {0, 0.5, 1, 2}; beta in [0,0.5], 400 points"};
        t.header = {"beta", "s_r0", "s_r05", "s_r1", "s_r2"};
        const double rs[4] = {0.0, 0.5, 1.0, 2.0};
        for (double b : beta_axis) {
            std::vector<double> row{b};
            for (double r : rs) {
                SystemParams p = figure_base(100.0, 0.8, b, r, 0.0);
                if (at_th) p.epsilon = threshold_epsilon(p);
                row.push_back(squeezing_s_minus_at(p, 0.0));
            }
            t.rows.push_back(row);
        }
    } else if (id == "fig11") {
        t.comments = {"steady mean photon number of the cavity mode vs beta",
                      "kappa=0.8 A=25; (r=0,eps=0), (r=0,eps=0.3), (r=1,eps=0.3)",
                      "beta in [0,0.5], 400 points"};
        t.header = {"beta", "nbar_r0_eps0", "nbar_r0_eps03", "nbar_r1_eps03"};
        for (double b : beta_axis) {
            t.rows.push_back({b,
                              mean_photon_cavity_steady(figure_base(25.0, 0.8, b, 0.0, 0.0)),
                              mean_photon_cavity_steady(figure_base(25.0, 0.8, b, 0.0, 0.3)),
                              mean_photon_cavity_steady(figure_base(25.0, 0.8, b, 1.0, 0.3))});
        }
    } else if (id == "fig12") {
        t.comments = {"steady mean photon number, output vs cavity mode",
                      "kappa=0.8 A=25 r=1 eps=0.3",
                      "beta in [0,0.3], 400 points (nbar crosses N = sinh^2 r near beta=0.33)"};
        t.header = {"beta", "nbar_output", "nbar_cavity"};
        for (double b : linspace(0.0, 0.3, kFigureAxisPoints)) {
            const SystemParams p = figure_base(25.0, 0.8, b, 1.0, 0.3);
            t.rows.push_back({b, mean_photon_output_steady(p), mean_photon_cavity_steady(p)});
        }
    } else if (id == "fig13") {
        t.comments = {"power spectrum of the cavity mode vs omega",
                      "A=100 beta=0.01 r=1 kappa=0.8; eps in {0, 0.2, 0.3}",
                      "omega in [0,5], 400 points"};
        t.header = {"omega", "s_eps0", "s_eps02", "s_eps03"};
        const auto omega_axis = linspace(0.0, 5.0, kFigureAxisPoints);
        const SystemParams p0 = figure_base(100.0, 0.8, 0.01, 1.0, 0.0);
        const SystemParams p2 = figure_base(100.0, 0.8, 0.01, 1.0, 0.2);
        const SystemParams p3 = figure_base(100.0, 0.8, 0.01, 1.0, 0.3);
        for (double w : omega_axis)
            t.rows.push_back({w, power_spectrum_cavity_at(p0, w), power_spectrum_cavity_at(p2, w),
                              power_spectrum_cavity_at(p3, w)});
    } else {
        throw config_error("unknown figure id '" + id + "' (expected fig2..fig13)");
    }
    emit_csv(t, out);
    return 0;
}

// --- sweep ----------------------------------------------------------------

inline double evaluate_quantity(const std::string& quantity, const SystemParams& p) {
    if (quantity == "cavity_minus") return cavity_variances(p).minus;
    if (quantity == "cavity_plus") {
        const QuadraturePair v = cavity_variances(p);
        return v.plus; // inf when divergent; emit_csv spells it out
    }
    if (quantity == "output_minus") return output_variances(p).minus;
    if (quantity == "output_plus") return output_variances(p).plus;
    if (quantity == "nbar") return mean_photon_cavity_steady(p);
    if (quantity == "nbar_out") return mean_photon_output_steady(p);
    if (quantity == "s_minus_0") return squeezing_s_minus_at(p, 0.0);
    if (quantity == "s_plus_0") return squeezing_s_plus_at(p, 0.0);
    throw config_error("unknown quantity '" + quantity + "'");
}

inline int run_sweep(const RunConfig& cfg, const std::filesystem::path& out) {
    const std::string& var = cfg.sweep.variable;
    if (var != "beta" && var != "epsilon" && var != "r" && var != "A" && var != "kappa")
        throw config_error("sweep_var must be one of beta, epsilon, r, A, kappa");
    CsvTable t;
    t.comments = {"sweep of " + cfg.quantity + " over " + var, params_comment(cfg.params)};
    t.header = {var, cfg.quantity};
    for (double x : linspace(cfg.sweep.min, cfg.sweep.max, cfg.sweep.points)) {
        SystemParams p = cfg.params;
        if (var == "beta") p.beta = x;
        else if (var == "epsilon") p.epsilon = x;
        else if (var == "r") p.squeeze_r = x;
        else if (var == "A") p.linear_gain = x;
        else p.kappa = x;
        if (cfg.eps_rule == EpsilonRule::at_threshold && var != "epsilon")
            p.epsilon = threshold_epsilon(p);
        t.rows.push_back({x, evaluate_quantity(cfg.quantity, p)});
    }
    emit_csv(t, out);
    return 0;
}

inline int run_report(const RunConfig& cfg, const std::filesystem::path& out) {
    OracleOptions opt;
    opt.mc_n_traj = cfg.mc.n_traj;
    opt.mc_seed = cfg.mc.seed;
    const OracleSuiteResult suite = run_oracle_suite(oracle_parameter_sets(), opt);
    const std::string text = verification_report(suite);
    std::cout << text;
    std::ofstream os(out, std::ios::binary);
    if (os) os << text;
    return suite.all_ok ? 0 : 1;
}

} // namespace detail

// Dispatch a validated configuration: returns the process exit code and
// writes the command's CSV (or text report) artifact.
inline int run_command(const RunConfig& cfg) {
    const std::filesystem::path out =
        cfg.out_path.empty() ? std::filesystem::path(detail::default_output_name(cfg))
                             : std::filesystem::path(cfg.out_path);
    switch (cfg.command) {
        case Command::coeffs: return detail::run_coeffs(cfg, out);
        case Command::variance: return detail::run_variance(cfg, out);
        case Command::spectrum: return detail::run_spectrum(cfg, out);
        case Command::photon: return detail::run_photon(cfg, out);
        case Command::power: return detail::run_power(cfg, out);
        case Command::mc: return detail::run_mc(cfg, out);
        case Command::oracle: return detail::run_oracle(cfg, out);
        case Command::figure: return detail::run_figure(cfg, out);
        case Command::sweep: return detail::run_sweep(cfg, out);
        case Command::report: return detail::run_report(cfg, out);
    }
    return 2;
}

} // namespace casq
