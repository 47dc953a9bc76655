#include "fairpr/io.hpp"

#include <ostream>

#include "fairpr/errors.hpp"
#include "text.hpp"

namespace fairpr {

void write_scores_csv(std::span<const double> scores, std::ostream& out) {
    out << "node,score\n";
    for (std::size_t i = 0; i < scores.size(); ++i) out << i << ',' << text::format_double(scores[i]) << '\n';
}

void write_solution_csv(std::span<const double> jump, std::span<const double> scores,
                        std::ostream& out) {
    if (jump.size() != scores.size()) throw InputError("jump and score vectors differ in length");
    out << "node,jump_prob,score\n";
    for (std::size_t i = 0; i < jump.size(); ++i) {
        out << i << ',' << text::format_double(jump[i]) << ',' << text::format_double(scores[i]) << '\n';
    }
}

} // namespace fairpr
