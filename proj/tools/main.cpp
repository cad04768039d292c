#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qrcsl/cli/run.hpp"

// Exit codes: 0 success, 1 configuration or usage error, 2 a numerical
// routine failed its accuracy target, 3 results carry a statistics warning.
// The wall-time report goes to stderr so the serialized artifact is
// byte-identical across repeated runs.

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw qrcsl::config_error("cannot read config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"qrcsl: collapse-model rates, kernels, and lattice trajectories"};
    app.require_subcommand(1);

    std::string config_path, out_path, format_name = "json";
    std::uint64_t seed_value = 0;
    bool quiet = false;

    app.add_option("--config", config_path, "configuration file (key = value unit)");
    auto* seed_opt = app.add_option("--seed", seed_value, "override the run seed");
    app.add_option("--out", out_path, "write the artifact to this path (atomic)");
    app.add_option("--format", format_name, "artifact format")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_flag("--quiet", quiet, "suppress the wall-time report on stderr");

    const char* names[] = {"kernels",  "collapse-rate", "energy-rate",
                           "simulate", "excitation",    "scan"};
    const char* blurbs[] = {
        "closed-form kernels against their quadrature oracles",
        "two-packet off-diagonal decay rate across the mass sweep",
        "free-particle energy gain rate and its large-mass asymptote",
        "stochastic lattice trajectories for a two-packet state",
        "nuclear quadrupole excitation predictions and exclusion flags",
        "excitation exclusion over a (lambda, a) parameter grid"};
    for (int i = 0; i < 6; ++i) app.add_subcommand(names[i], blurbs[i])->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // usage problems are configuration errors
    }

    try {
        qrcsl::RunConfig cfg = config_path.empty() ? qrcsl::RunConfig{}
                                                   : qrcsl::parse_config(read_file(config_path));
        cfg.subcommand = app.get_subcommands().front()->get_name();
        if (seed_opt->count() > 0) cfg.seed = seed_value;

        const auto t0 = std::chrono::steady_clock::now();
        qrcsl::RunOutcome outcome = qrcsl::run(cfg);
        outcome.envelope.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        const auto fmt =
            format_name == "csv" ? qrcsl::OutputFormat::csv : qrcsl::OutputFormat::json;
        const std::string body = qrcsl::serialize(outcome.envelope, fmt);
        if (out_path.empty())
            std::fwrite(body.data(), 1, body.size(), stdout);
        else
            qrcsl::write_text_atomic(out_path, body);

        if (!quiet)
            std::fprintf(stderr, "wall time: %.3f s\n", outcome.envelope.wall_time_s);
        return outcome.exit_code;
    } catch (const qrcsl::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
