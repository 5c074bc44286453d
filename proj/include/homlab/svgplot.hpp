#pragma once

#include <string>

#include "homlab/eventsim.hpp"

namespace homlab {

// Self-contained SVG of the coincidence scan: per-point aggregated counts
// with Poisson error bars, the fitted dip curve, and a visibility/width
// annotation. No external assets; output is deterministic and diffable.
void render_dip_svg(const ScanResult& scan, const ScanFit& fit,
                    const std::string& path);

}  // namespace homlab
