#pragma once

#include <string>
#include <vector>

#include "qrcsl/errors.hpp"

namespace qrcsl {

// Physical inputs.  Everything downstream works in collapse units
// (hbar = c = 1, lengths in units of a, momenta in units of 1/a), where each
// rate reduces to lambda * f(mu) and mu = M*a is the only surviving knob;
// conversion back to physical units happens only through this struct.
struct ModelParams {
    double lambda = 1e-16;           // collapse rate, 1/s
    double a = 1e-5;                 // collapse length, cm
    double M = 4.7553e13;            // nucleon mass as inverse length Mc/hbar, 1/cm
    double alpha_fs = 1.0 / 137.036; // fine-structure constant
    double c = 2.99792458e10;        // speed of light, cm/s
    double hbar = 1.0545718e-27;     // erg s, for energy-rate conversion

    // derived, never stored
    double mu() const { return M * a; }

    std::vector<std::string> validation_errors() const
    {
        std::vector<std::string> bad;
        if (!(lambda > 0.0)) bad.push_back("lambda: collapse rate must be positive");
        if (!(a > 0.0)) bad.push_back("a: collapse length must be positive");
        if (!(M > 0.0)) bad.push_back("M: particle mass must be positive");
        if (!(alpha_fs > 0.0)) bad.push_back("alpha_fs: must be positive");
        if (!(c > 0.0)) bad.push_back("c: speed of light must be positive");
        if (!(hbar > 0.0)) bad.push_back("hbar: must be positive");
        return bad;
    }

    void validate() const
    {
        const auto bad = validation_errors();
        if (bad.empty()) return;
        std::string msg = "invalid model parameters:";
        for (const auto& b : bad) msg += "\n  " + b;
        throw config_error(msg);
    }
};

} // namespace qrcsl
