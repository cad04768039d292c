#pragma once

#include "qrcsl/errors.hpp"

namespace qrcsl {

/// Superposition geometry: two Gaussian packets of common width, centers a
/// fixed distance apart, in units of the collapse length.
struct TwoPacketState {
    double separation = 10.0;  // between centers
    double width = 0.5;        // sigma of each packet
    double weight_left = 0.5;  // |alpha|^2

    // The decay-rate formulas drop the packet-overlap cross term, which is
    // justified only when the supports are far apart on both the packet and
    // the collapse-length scales.
    bool widely_separated() const { return separation >= 5.0 * (width + 1.0); }

    void validate() const
    {
        if (!(separation >= 0.0))
            throw config_error("two-packet state: separation must be >= 0");
        if (!(width > 0.0)) throw config_error("two-packet state: width must be > 0");
        if (!(weight_left >= 0.0 && weight_left <= 1.0))
            throw config_error("two-packet state: weight_left must lie in [0, 1]");
    }
};

} // namespace qrcsl
