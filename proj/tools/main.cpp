#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "casq/casq.hpp"

namespace {

constexpr const char* kUsage = R"(casq - degenerate three-level cascade laser with parametric amplifier
       and squeezed vacuum reservoir: steady-state, spectral and Monte Carlo
       evaluation

usage: casq <command> [figN] [--key value]...

commands:
  coeffs     derived master-equation coefficients, decay rates, threshold
  variance   steady-state quadrature variances (cavity and output mode)
  spectrum   output-mode squeezing spectrum over an omega grid
  photon     mean photon number vs time (and steady state)
  power      power spectra of the cavity and output modes
  mc         doubled-phase-space Langevin ensemble statistics
  oracle     closed form vs ODE vs density matrix vs Monte Carlo, one set
  figure     reproduce a curve data set, id in fig2..fig13
  sweep      sweep one parameter and tabulate a named quantity
  report     full cross-check suite and consistency-variant comparisons

parameters (all rates in one arbitrary inverse-time unit):
  --kappa x     cavity damping rate (> 0)
  --A x         linear gain coefficient (>= 0)
  --beta x      pump ratio Omega/gamma (>= 0)
  --epsilon x   amplifier strength, a number or the word `threshold`
  --r x         reservoir squeeze parameter (>= 0)
  --g --r_a --gamma --Omega --lambda --mu
                microscopic rates; builds A = 2 g^2 r_a / gamma^2,
                beta = Omega/gamma, epsilon = lambda mu

other flags: --config <path>, --out <path>, --seed <u64>, --ntraj <n>,
  --dt <x>, --mc_t_end <x>, --omega_min/--omega_max/--omega_points,
  --beta_min/--beta_max/--beta_points, --t_end/--t_points,
  --sweep_var/--sweep_min/--sweep_max/--sweep_points, --quantity <name>

config file: flat key=value lines, '#' comments; flags override file values.
exit codes: 0 success, 1 numerical/stability failure, 2 usage/config error.
)";

std::string load_config_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw casq::config_error("cannot read config file: " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty() || args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
        std::cout << kUsage;
        return args.empty() ? 2 : 0;
    }
    try {
        std::string config_text;
        std::vector<std::string> rest;
        rest.reserve(args.size());
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config") {
                if (i + 1 >= args.size())
                    throw casq::config_error("--config needs a path");
                config_text = load_config_file(args[++i]);
            } else {
                rest.push_back(args[i]);
            }
        }
        const casq::RunConfig cfg = casq::parse_config(rest, config_text);
        return casq::run_command(cfg);
    } catch (const casq::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const casq::stability_error& e) {
        std::cerr << "stability error: " << e.what() << "\n";
        return 1;
    } catch (const casq::physicality_error& e) {
        std::cerr << "physicality error: " << e.what() << "\n";
        return 1;
    } catch (const casq::truncation_error& e) {
        std::cerr << "truncation error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
