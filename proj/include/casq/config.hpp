#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "casq/minimize.hpp"

namespace casq {

enum class Command { coeffs, variance, spectrum, photon, power, mc, oracle, figure, sweep, report };

struct GridSpec {
    double min = 0.0;
    double max = 1.0;
    int points = 401;
};

struct McConfig {
    int n_traj = 10000;
    double dt = 0.0;    // 0 = 1e-3 / lambda_plus
    double t_end = 0.0; // 0 = 20 / lambda_minus
    std::uint64_t seed = 1;
};

struct SweepSpec {
    std::string variable = "beta";
    double min = 0.0;
    double max = 0.5;
    int points = 101;
};

struct RunConfig {
    SystemParams params;
    EpsilonRule eps_rule = EpsilonRule::fixed;
    Command command = Command::coeffs;
    std::string figure_id;
    GridSpec omega{0.0, 10.0, 401};
    GridSpec beta_grid{0.0, 0.5, 401};
    double t_end = 0.0; // photon command transient horizon; 0 = auto
    int t_points = 201;
    McConfig mc;
    SweepSpec sweep;
    std::string quantity = "cavity_minus";
    std::string out_path; // empty = per-command default name
};

// Epsilon resolved against the current beta; the `threshold` keyword tracks
// beta wherever a command sweeps it.
inline SystemParams resolved_params(const RunConfig& cfg) {
    SystemParams p = cfg.params;
    if (cfg.eps_rule == EpsilonRule::at_threshold) p.epsilon = threshold_epsilon(p);
    return p;
}

namespace detail {

inline double parse_number(std::string_view key, std::string_view text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last)
        throw config_error("value for '" + std::string(key) + "' is not a number: '" +
                           std::string(text) + "'");
    return v;
}

inline std::uint64_t parse_u64(std::string_view key, std::string_view text) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw config_error("value for '" + std::string(key) + "' is not an unsigned integer: '" +
                           std::string(text) + "'");
    return v;
}

inline int parse_int(std::string_view key, std::string_view text) {
    int v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw config_error("value for '" + std::string(key) + "' is not an integer: '" +
                           std::string(text) + "'");
    return v;
}

struct MicroInput {
    std::optional<double> g, r_a, gamma, omega_pump, lambda_pump, mu;
    bool any() const { return g || r_a || gamma || omega_pump || lambda_pump || mu; }
};

struct ConfigBuilder {
    RunConfig cfg;
    MicroInput micro;
    bool epsilon_explicit = false;

    void apply(std::string_view key, std::string_view value) {
        if (key == "kappa") cfg.params.kappa = parse_number(key, value);
        else if (key == "A") cfg.params.linear_gain = parse_number(key, value);
        else if (key == "beta") cfg.params.beta = parse_number(key, value);
        else if (key == "r") cfg.params.squeeze_r = parse_number(key, value);
        else if (key == "epsilon") {
            epsilon_explicit = true;
            if (value == "threshold") {
                cfg.eps_rule = EpsilonRule::at_threshold;
            } else {
                cfg.eps_rule = EpsilonRule::fixed;
                cfg.params.epsilon = parse_number(key, value);
            }
        }
        else if (key == "g") micro.g = parse_number(key, value);
        else if (key == "r_a") micro.r_a = parse_number(key, value);
        else if (key == "gamma") micro.gamma = parse_number(key, value);
        else if (key == "Omega") micro.omega_pump = parse_number(key, value);
        else if (key == "lambda") micro.lambda_pump = parse_number(key, value);
        else if (key == "mu") micro.mu = parse_number(key, value);
        else if (key == "ntraj") cfg.mc.n_traj = parse_int(key, value);
        else if (key == "dt") cfg.mc.dt = parse_number(key, value);
        else if (key == "mc_t_end") cfg.mc.t_end = parse_number(key, value);
        else if (key == "seed") cfg.mc.seed = parse_u64(key, value);
        else if (key == "omega_min") cfg.omega.min = parse_number(key, value);
        else if (key == "omega_max") cfg.omega.max = parse_number(key, value);
        else if (key == "omega_points") cfg.omega.points = parse_int(key, value);
        else if (key == "beta_min") cfg.beta_grid.min = parse_number(key, value);
        else if (key == "beta_max") cfg.beta_grid.max = parse_number(key, value);
        else if (key == "beta_points") cfg.beta_grid.points = parse_int(key, value);
        else if (key == "t_end") cfg.t_end = parse_number(key, value);
        else if (key == "t_points") cfg.t_points = parse_int(key, value);
        else if (key == "sweep_var") cfg.sweep.variable = std::string(value);
        else if (key == "sweep_min") cfg.sweep.min = parse_number(key, value);
        else if (key == "sweep_max") cfg.sweep.max = parse_number(key, value);
        else if (key == "sweep_points") cfg.sweep.points = parse_int(key, value);
        else if (key == "quantity") cfg.quantity = std::string(value);
        else if (key == "out") cfg.out_path = std::string(value);
        else throw config_error("unknown key '" + std::string(key) + "'");
    }

    void finalize() {
        if (micro.any()) {
            if (!micro.g || !micro.r_a || !micro.gamma)
                throw config_error("microscopic input needs g, r_a and gamma");
            try {
                SystemParams p = from_microscopic(
                    *micro.g, *micro.r_a, *micro.gamma, micro.omega_pump.value_or(0.0),
                    micro.lambda_pump.value_or(0.0), micro.mu.value_or(0.0), cfg.params.kappa,
                    cfg.params.squeeze_r);
                if (epsilon_explicit && cfg.eps_rule == EpsilonRule::fixed)
                    p.epsilon = cfg.params.epsilon;
                cfg.params = p;
            } catch (const std::domain_error& e) {
                throw config_error(e.what());
            }
        }
        try {
            cfg.params.validate();
        } catch (const std::domain_error& e) {
            throw config_error(e.what());
        }
        if (cfg.mc.n_traj < 2) throw config_error("ntraj must be >= 2");
        if (cfg.mc.dt < 0.0) throw config_error("dt must be > 0 (or omitted)");
        if (cfg.omega.points < 2 || cfg.beta_grid.points < 2 || cfg.t_points < 2)
            throw config_error("grid point counts must be >= 2");
        if (!(cfg.omega.max >= cfg.omega.min) || !(cfg.beta_grid.max >= cfg.beta_grid.min))
            throw config_error("grid bounds must be ordered");
        if (cfg.command == Command::sweep) {
            if (cfg.sweep.points < 2) throw config_error("sweep_points must be >= 2");
            if (!std::isfinite(cfg.sweep.min) || !std::isfinite(cfg.sweep.max) ||
                !(cfg.sweep.max > cfg.sweep.min))
                throw config_error("sweep range bounds must be finite and ordered");
        }
    }
};

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

} // namespace detail

inline Command command_from_string(std::string_view s) {
    if (s == "coeffs") return Command::coeffs;
    if (s == "variance") return Command::variance;
    if (s == "spectrum") return Command::spectrum;
    if (s == "photon") return Command::photon;
    if (s == "power") return Command::power;
    if (s == "mc") return Command::mc;
    if (s == "oracle") return Command::oracle;
    if (s == "figure") return Command::figure;
    if (s == "sweep") return Command::sweep;
    if (s == "report") return Command::report;
    throw config_error("unknown command '" + std::string(s) + "'");
}

// Flat key=value text, '#' comments. Later keys override earlier ones.
inline void apply_config_text(detail::ConfigBuilder& b, std::string_view text) {
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        ++line_no;
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        const std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw config_error("config line " + std::to_string(line_no) + " is not key=value");
        b.apply(detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
}

// Command line shape: <command> [figN] [--key value]... ; file values loaded
// via --config first, flags override them.
inline RunConfig parse_config(const std::vector<std::string>& args,
                              const std::string& config_text = "") {
    detail::ConfigBuilder b;
    if (args.empty()) throw config_error("missing command");
    b.cfg.command = command_from_string(args[0]);
    std::size_t i = 1;
    if (b.cfg.command == Command::figure) {
        if (i >= args.size() || args[i].rfind("--", 0) == 0)
            throw config_error("figure command needs an id (fig2..fig13)");
        b.cfg.figure_id = args[i++];
    }
    if (!config_text.empty()) apply_config_text(b, config_text);
    for (; i < args.size(); ++i) {
        std::string_view a = args[i];
        if (a.rfind("--", 0) != 0)
            throw config_error("unexpected argument '" + std::string(a) + "'");
        a.remove_prefix(2);
        if (i + 1 >= args.size())
            throw config_error("flag '--" + std::string(a) + "' needs a value");
        b.apply(a, args[++i]);
    }
    b.finalize();
    return b.cfg;
}

} // namespace casq
