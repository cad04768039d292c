#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "qrcsl/errors.hpp"
#include "qrcsl/excitation/quadrupole.hpp"
#include "qrcsl/free_rates/rate_result.hpp"
#include "qrcsl/free_rates/two_packet.hpp"
#include "qrcsl/kernels/model_params.hpp"
#include "qrcsl/trajectories/noise.hpp"

// Run configuration and its line-oriented text format.
//
// Every numeric key carries an explicit unit token after the value, checked
// against the table below; dimensionless quantities use the token "1".
// Lengths follow the module conventions: packet geometry and lattice spacing
// are in units of the collapse length, lattice time is in units of the
// inverse collapse rate.  String-valued keys (variant, scheme, label) carry
// no unit.  `#` starts a comment, `[section]` switches sections, unknown
// sections and keys are rejected, and parsing reports every problem found,
// not just the first.

namespace qrcsl {

inline constexpr std::uint64_t default_seed = 20250823;  // fixed, not wall-clock

struct SweepSettings {
    std::vector<double> mu_values{0.5, 1.0, 10.0, 100.0};

    std::vector<std::string> validation_errors() const
    {
        std::vector<std::string> bad;
        if (mu_values.empty()) bad.push_back("mu_values: need at least one value");
        for (double m : mu_values)
            if (!(m > 0.0)) bad.push_back("mu_values: entries must be positive");
        return bad;
    }
};

struct EnergyScanSettings {
    double mu_min = 1.0;
    double mu_max = 1000.0;
    int points_per_decade = 4;

    std::vector<std::string> validation_errors() const
    {
        std::vector<std::string> bad;
        if (!(mu_min > 0.0)) bad.push_back("mu_min: must be positive");
        if (!(mu_max >= mu_min)) bad.push_back("mu_max: must be >= mu_min");
        if (points_per_decade < 1) bad.push_back("points_per_decade: must be >= 1");
        return bad;
    }
};

struct LatticeSettings {
    int sites = 64;
    double spacing = M_PI / 10.0;
    double time_step = 0.02;
    ModelVariant variant = ModelVariant::CSL;
    double mu = 1000.0;            // used by the quasirelativistic variant
    double momentum_cutoff = 10.0; // 0 means the Nyquist momentum

    std::vector<std::string> validation_errors() const
    {
        std::vector<std::string> bad;
        if (sites < 2) bad.push_back("sites: need at least 2");
        if (!(spacing > 0.0)) bad.push_back("spacing: must be positive");
        if (!(time_step > 0.0)) bad.push_back("time_step: must be positive");
        if (variant == ModelVariant::RCSL)
            bad.push_back("variant: lattice simulation supports csl and qrcsl only");
        if (!(mu > 0.0)) bad.push_back("mu: must be positive");
        if (!(momentum_cutoff >= 0.0)) bad.push_back("momentum_cutoff: must be >= 0");
        return bad;
    }
};

struct EnsembleSettings {
    int trajectories = 1000;
    double t_final = 8.0;
    int checkpoints = 4;
    NoiseScheme scheme = NoiseScheme::cooked;
    double sim_mass = std::numeric_limits<double>::infinity();

    std::vector<std::string> validation_errors() const
    {
        std::vector<std::string> bad;
        if (trajectories < 1) bad.push_back("trajectories: must be >= 1");
        if (!(t_final > 0.0)) bad.push_back("t_final: must be positive");
        if (checkpoints < 1) bad.push_back("checkpoints: must be >= 1");
        if (!(sim_mass > 0.0)) bad.push_back("sim_mass: must be positive (inf freezes motion)");
        return bad;
    }
};

struct ExcitationSettings {
    double b_over_a = 0.01;  // bound-state size over collapse length

    std::vector<std::string> validation_errors() const
    {
        std::vector<std::string> bad;
        if (!(b_over_a > 0.0)) bad.push_back("b_over_a: must be positive");
        return bad;
    }
};

struct ScanSettings {
    double lambda_min = 1e-17;
    double lambda_max = 1e-15;
    int lambda_points = 3;
    double a_min = 1e-5;
    double a_max = 1e-5;
    int a_points = 1;

    std::vector<std::string> validation_errors() const
    {
        std::vector<std::string> bad;
        if (!(lambda_min > 0.0)) bad.push_back("lambda_min: must be positive");
        if (!(lambda_max >= lambda_min)) bad.push_back("lambda_max: must be >= lambda_min");
        if (lambda_points < 1) bad.push_back("lambda_points: must be >= 1");
        if (!(a_min > 0.0)) bad.push_back("a_min: must be positive");
        if (!(a_max >= a_min)) bad.push_back("a_max: must be >= a_min");
        if (a_points < 1) bad.push_back("a_points: must be >= 1");
        return bad;
    }
};

struct RunConfig {
    std::string subcommand;  // set by the dispatcher, not the config text
    ModelParams params;
    TwoPacketState packets;
    SweepSettings sweep;
    EnergyScanSettings energy_scan;
    LatticeSettings lattice;
    EnsembleSettings ensemble;
    ExcitationSettings excitation;
    NucleusSpec nucleus;
    ScanSettings scan;
    std::uint64_t seed = default_seed;
};

namespace detail {

inline std::string trim(const std::string& s)
{
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// One key = value line split into a numeric body and a trailing unit token.
struct UnitValue {
    std::string body;
    std::string unit;
    bool has_unit = false;
};

inline UnitValue split_unit(const std::string& rhs)
{
    const std::size_t cut = rhs.find_last_of(" \t");
    if (cut == std::string::npos) return {rhs, {}, false};
    return {trim(rhs.substr(0, cut)), trim(rhs.substr(cut + 1)), true};
}

class ConfigReader {
public:
    explicit ConfigReader(std::vector<std::string>& errors) : errors_(errors) {}

    void fail(int line, const std::string& what)
    {
        errors_.push_back("line " + std::to_string(line) + ": " + what);
    }

    bool number(int line, const std::string& key, const std::string& rhs,
                const std::string& unit, double& out)
    {
        const UnitValue uv = split_unit(rhs);
        if (!uv.has_unit) {
            fail(line, key + ": missing unit (expected '" + unit + "')");
            return false;
        }
        if (uv.unit != unit) {
            fail(line, key + ": unit '" + uv.unit + "' (expected '" + unit + "')");
            return false;
        }
        return parse_double(line, key, uv.body, out);
    }

    bool integer(int line, const std::string& key, const std::string& rhs,
                 const std::string& unit, int& out)
    {
        double v = 0.0;
        if (!number(line, key, rhs, unit, v)) return false;
        if (!(std::abs(v) < 2.1e9) || v != std::floor(v)) {
            fail(line, key + ": expected an integer");
            return false;
        }
        out = static_cast<int>(v);
        return true;
    }

    bool unsigned64(int line, const std::string& key, const std::string& rhs,
                    const std::string& unit, std::uint64_t& out)
    {
        const UnitValue uv = split_unit(rhs);
        if (!uv.has_unit || uv.unit != unit) {
            fail(line, key + ": missing or wrong unit (expected '" + unit + "')");
            return false;
        }
        char* end = nullptr;
        const unsigned long long v = std::strtoull(uv.body.c_str(), &end, 10);
        if (end == uv.body.c_str() || *end != '\0' || uv.body.find('-') != std::string::npos) {
            fail(line, key + ": expected an unsigned integer, got '" + uv.body + "'");
            return false;
        }
        out = v;
        return true;
    }

    bool number_list(int line, const std::string& key, const std::string& rhs,
                     const std::string& unit, std::vector<double>& out)
    {
        const UnitValue uv = split_unit(rhs);
        if (!uv.has_unit) {
            fail(line, key + ": missing unit (expected '" + unit + "')");
            return false;
        }
        if (uv.unit != unit) {
            fail(line, key + ": unit '" + uv.unit + "' (expected '" + unit + "')");
            return false;
        }
        std::vector<double> vals;
        std::string item;
        std::istringstream items(uv.body);
        while (std::getline(items, item, ',')) {
            double v = 0.0;
            if (!parse_double(line, key, trim(item), v)) return false;
            vals.push_back(v);
        }
        if (vals.empty()) {
            fail(line, key + ": empty list");
            return false;
        }
        out = std::move(vals);
        return true;
    }

private:
    bool parse_double(int line, const std::string& key, const std::string& body, double& out)
    {
        if (body.empty()) {
            fail(line, key + ": missing value");
            return false;
        }
        char* end = nullptr;
        const double v = std::strtod(body.c_str(), &end);
        if (end == body.c_str() || *end != '\0') {
            fail(line, key + ": cannot parse number '" + body + "'");
            return false;
        }
        out = v;
        return true;
    }

    std::vector<std::string>& errors_;
};

}  // namespace detail

inline RunConfig parse_config(const std::string& text)
{
    RunConfig cfg;
    std::vector<std::string> errors;
    detail::ConfigReader rd(errors);

    std::string section;
    std::string line;
    std::istringstream in(text);
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') {
                rd.fail(line_no, "unterminated section header '" + line + "'");
                continue;
            }
            section = detail::trim(line.substr(1, line.size() - 2));
            static const char* known[] = {"model",    "packets",  "sweep",
                                          "energy_scan", "lattice",  "ensemble",
                                          "excitation",  "nucleus",  "scan",
                                          "run"};
            bool ok = false;
            for (const char* s : known) ok = ok || section == s;
            if (!ok) rd.fail(line_no, "unknown section [" + section + "]");
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            rd.fail(line_no, "expected 'key = value', got '" + line + "'");
            continue;
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string rhs = detail::trim(line.substr(eq + 1));
        if (key.empty() || rhs.empty()) {
            rd.fail(line_no, "expected 'key = value', got '" + line + "'");
            continue;
        }

        auto unknown = [&] {
            rd.fail(line_no, "unknown key '" + key + "' in [" + section + "]");
        };

        if (section == "model") {
            if (key == "lambda") rd.number(line_no, key, rhs, "/s", cfg.params.lambda);
            else if (key == "a") rd.number(line_no, key, rhs, "cm", cfg.params.a);
            else if (key == "M") rd.number(line_no, key, rhs, "1/cm", cfg.params.M);
            else if (key == "alpha_fs") rd.number(line_no, key, rhs, "1", cfg.params.alpha_fs);
            else if (key == "c") rd.number(line_no, key, rhs, "cm/s", cfg.params.c);
            else if (key == "hbar") rd.number(line_no, key, rhs, "erg*s", cfg.params.hbar);
            else unknown();
        } else if (section == "packets") {
            if (key == "separation") rd.number(line_no, key, rhs, "a", cfg.packets.separation);
            else if (key == "width") rd.number(line_no, key, rhs, "a", cfg.packets.width);
            else if (key == "weight_left") rd.number(line_no, key, rhs, "1", cfg.packets.weight_left);
            else unknown();
        } else if (section == "sweep") {
            if (key == "mu_values") rd.number_list(line_no, key, rhs, "1", cfg.sweep.mu_values);
            else unknown();
        } else if (section == "energy_scan") {
            if (key == "mu_min") rd.number(line_no, key, rhs, "1", cfg.energy_scan.mu_min);
            else if (key == "mu_max") rd.number(line_no, key, rhs, "1", cfg.energy_scan.mu_max);
            else if (key == "points_per_decade")
                rd.integer(line_no, key, rhs, "1", cfg.energy_scan.points_per_decade);
            else unknown();
        } else if (section == "lattice") {
            if (key == "sites") rd.integer(line_no, key, rhs, "1", cfg.lattice.sites);
            else if (key == "spacing") rd.number(line_no, key, rhs, "a", cfg.lattice.spacing);
            else if (key == "time_step") rd.number(line_no, key, rhs, "1", cfg.lattice.time_step);
            else if (key == "mu") rd.number(line_no, key, rhs, "1", cfg.lattice.mu);
            else if (key == "momentum_cutoff")
                rd.number(line_no, key, rhs, "1/a", cfg.lattice.momentum_cutoff);
            else if (key == "variant") {
                if (rhs == "csl") cfg.lattice.variant = ModelVariant::CSL;
                else if (rhs == "qrcsl") cfg.lattice.variant = ModelVariant::QRCSL;
                else rd.fail(line_no, "variant: expected csl or qrcsl, got '" + rhs + "'");
            } else unknown();
        } else if (section == "ensemble") {
            if (key == "trajectories") rd.integer(line_no, key, rhs, "1", cfg.ensemble.trajectories);
            else if (key == "t_final") rd.number(line_no, key, rhs, "1", cfg.ensemble.t_final);
            else if (key == "checkpoints") rd.integer(line_no, key, rhs, "1", cfg.ensemble.checkpoints);
            else if (key == "sim_mass") rd.number(line_no, key, rhs, "1", cfg.ensemble.sim_mass);
            else if (key == "scheme") {
                if (rhs == "cooked") cfg.ensemble.scheme = NoiseScheme::cooked;
                else if (rhs == "raw") cfg.ensemble.scheme = NoiseScheme::raw;
                else rd.fail(line_no, "scheme: expected cooked or raw, got '" + rhs + "'");
            } else unknown();
        } else if (section == "excitation") {
            if (key == "b_over_a") rd.number(line_no, key, rhs, "1", cfg.excitation.b_over_a);
            else unknown();
        } else if (section == "nucleus") {
            if (key == "k") rd.number(line_no, key, rhs, "1/cm", cfg.nucleus.k);
            else if (key == "tau") rd.number(line_no, key, rhs, "s", cfg.nucleus.tau);
            else if (key == "delta_e") rd.number(line_no, key, rhs, "MeV", cfg.nucleus.delta_e);
            else if (key == "nuclei_per_kg")
                rd.number(line_no, key, rhs, "1/kg", cfg.nucleus.nuclei_per_kg);
            else if (key == "label") cfg.nucleus.label = rhs;
            else unknown();
        } else if (section == "scan") {
            if (key == "lambda_min") rd.number(line_no, key, rhs, "/s", cfg.scan.lambda_min);
            else if (key == "lambda_max") rd.number(line_no, key, rhs, "/s", cfg.scan.lambda_max);
            else if (key == "lambda_points")
                rd.integer(line_no, key, rhs, "1", cfg.scan.lambda_points);
            else if (key == "a_min") rd.number(line_no, key, rhs, "cm", cfg.scan.a_min);
            else if (key == "a_max") rd.number(line_no, key, rhs, "cm", cfg.scan.a_max);
            else if (key == "a_points") rd.integer(line_no, key, rhs, "1", cfg.scan.a_points);
            else unknown();
        } else if (section == "run") {
            if (key == "seed") rd.unsigned64(line_no, key, rhs, "1", cfg.seed);
            else unknown();
        } else {
            rd.fail(line_no, "key '" + key + "' before any [section]");
        }
    }

    // every value parsed; now collect range problems from all sections
    auto absorb = [&](const char* sec, const std::vector<std::string>& bad) {
        for (const auto& b : bad) errors.push_back(std::string("[") + sec + "] " + b);
    };
    absorb("model", cfg.params.validation_errors());
    try {
        cfg.packets.validate();
    } catch (const config_error& e) {
        errors.push_back(std::string("[packets] ") + e.what());
    }
    absorb("sweep", cfg.sweep.validation_errors());
    absorb("energy_scan", cfg.energy_scan.validation_errors());
    absorb("lattice", cfg.lattice.validation_errors());
    absorb("ensemble", cfg.ensemble.validation_errors());
    absorb("excitation", cfg.excitation.validation_errors());
    absorb("nucleus", cfg.nucleus.validation_errors());
    absorb("scan", cfg.scan.validation_errors());

    if (!errors.empty()) {
        std::string msg = "invalid config:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw config_error(msg);
    }
    return cfg;
}

// Full resolved echo of a config, parseable back into an identical RunConfig.
inline std::string render_config(const RunConfig& cfg)
{
    using detail::fmt17;
    std::string o;
    o += "[model]\n";
    o += "lambda = " + fmt17(cfg.params.lambda) + " /s\n";
    o += "a = " + fmt17(cfg.params.a) + " cm\n";
    o += "M = " + fmt17(cfg.params.M) + " 1/cm\n";
    o += "alpha_fs = " + fmt17(cfg.params.alpha_fs) + " 1\n";
    o += "c = " + fmt17(cfg.params.c) + " cm/s\n";
    o += "hbar = " + fmt17(cfg.params.hbar) + " erg*s\n";
    o += "\n[packets]\n";
    o += "separation = " + fmt17(cfg.packets.separation) + " a\n";
    o += "width = " + fmt17(cfg.packets.width) + " a\n";
    o += "weight_left = " + fmt17(cfg.packets.weight_left) + " 1\n";
    o += "\n[sweep]\n";
    o += "mu_values = ";
    for (std::size_t i = 0; i < cfg.sweep.mu_values.size(); ++i)
        o += (i ? ", " : "") + fmt17(cfg.sweep.mu_values[i]);
    o += " 1\n";
    o += "\n[energy_scan]\n";
    o += "mu_min = " + fmt17(cfg.energy_scan.mu_min) + " 1\n";
    o += "mu_max = " + fmt17(cfg.energy_scan.mu_max) + " 1\n";
    o += "points_per_decade = " + std::to_string(cfg.energy_scan.points_per_decade) + " 1\n";
    o += "\n[lattice]\n";
    o += "sites = " + std::to_string(cfg.lattice.sites) + " 1\n";
    o += "spacing = " + fmt17(cfg.lattice.spacing) + " a\n";
    o += "time_step = " + fmt17(cfg.lattice.time_step) + " 1\n";
    o += std::string("variant = ") +
         (cfg.lattice.variant == ModelVariant::QRCSL ? "qrcsl" : "csl") + "\n";
    o += "mu = " + fmt17(cfg.lattice.mu) + " 1\n";
    o += "momentum_cutoff = " + fmt17(cfg.lattice.momentum_cutoff) + " 1/a\n";
    o += "\n[ensemble]\n";
    o += "trajectories = " + std::to_string(cfg.ensemble.trajectories) + " 1\n";
    o += "t_final = " + fmt17(cfg.ensemble.t_final) + " 1\n";
    o += "checkpoints = " + std::to_string(cfg.ensemble.checkpoints) + " 1\n";
    o += std::string("scheme = ") + to_string(cfg.ensemble.scheme) + "\n";
    o += "sim_mass = " + fmt17(cfg.ensemble.sim_mass) + " 1\n";
    o += "\n[excitation]\n";
    o += "b_over_a = " + fmt17(cfg.excitation.b_over_a) + " 1\n";
    o += "\n[nucleus]\n";
    o += "k = " + fmt17(cfg.nucleus.k) + " 1/cm\n";
    o += "tau = " + fmt17(cfg.nucleus.tau) + " s\n";
    o += "delta_e = " + fmt17(cfg.nucleus.delta_e) + " MeV\n";
    o += "nuclei_per_kg = " + fmt17(cfg.nucleus.nuclei_per_kg) + " 1/kg\n";
    o += "label = " + cfg.nucleus.label + "\n";
    o += "\n[scan]\n";
    o += "lambda_min = " + fmt17(cfg.scan.lambda_min) + " /s\n";
    o += "lambda_max = " + fmt17(cfg.scan.lambda_max) + " /s\n";
    o += "lambda_points = " + std::to_string(cfg.scan.lambda_points) + " 1\n";
    o += "a_min = " + fmt17(cfg.scan.a_min) + " cm\n";
    o += "a_max = " + fmt17(cfg.scan.a_max) + " cm\n";
    o += "a_points = " + std::to_string(cfg.scan.a_points) + " 1\n";
    o += "\n[run]\n";
    o += "seed = " + std::to_string(cfg.seed) + " 1\n";
    return o;
}

} // namespace qrcsl
