#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "locmat/derivation.hpp"
#include "locmat/endo.hpp"
#include "locmat/minf.hpp"
#include "locmat/parser.hpp"

namespace locmat {

/// Runs one CLI invocation (argv without the program name). Output is
/// deterministic given identical flags and seed. Exit codes: 0 success or
/// verified, 1 verification failure, 2 usage error.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Line-oriented input files: `member <siteset> <expr>`, `family <expr>
/// start=<n>`, `image <site> <p> <q> <expr>`, `conjugator <expr>`; `#` starts
/// a comment.
SparseSystem parse_derivation_text(const std::string& text, const SessionConfig& config);
UnitalEndo parse_endo_text(const std::string& text, const SessionConfig& config);
ConjugatorSeq parse_seq_text(const std::string& text, const SessionConfig& config);

std::string format_system(const SparseSystem& s);
std::string format_expansion(const BasisExpansion& e);
std::string format_pattern(const PatternMatrix& m);

/// Pattern mini-syntax for the minf subcommands: `z`, `y<k>`, `id`,
/// `df:<c1,c2,...>`, `af:<c1,...>`, `e:<row>,<col>[:coeff]`.
PatternMatrix parse_pattern_spec(const std::string& spec, const SessionConfig& config);

} // namespace locmat
