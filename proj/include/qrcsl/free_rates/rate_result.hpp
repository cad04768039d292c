#pragma once

#include <string>

namespace qrcsl {

enum class ModelVariant { CSL, QRCSL, RCSL };

inline const char* to_string(ModelVariant m)
{
    switch (m) {
    case ModelVariant::CSL: return "CSL";
    case ModelVariant::QRCSL: return "QRCSL";
    default: return "RCSL";
    }
}

/// A computed rate and its unit conversion.  value_physical is always
/// value_dimensionless times the conversion factor recorded implicitly by
/// the producing operation (lambda for decay rates, lambda*n*M*hbar*c for
/// energy rates), so it can be recomputed from the model parameters.
struct RateResult {
    ModelVariant model;
    double value_dimensionless;
    double value_physical;
    double mu;
    std::string note;  // regime warnings; empty when clean
};

} // namespace qrcsl
