#pragma once

#include <iosfwd>
#include <span>

namespace fairpr {

/// `node,score`, 17 significant digits.
void write_scores_csv(std::span<const double> scores, std::ostream& out);

/// `node,jump_prob,score`
void write_solution_csv(std::span<const double> jump, std::span<const double> scores,
                        std::ostream& out);

} // namespace fairpr
