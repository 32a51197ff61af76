#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "rankone/bfree.hpp"
#include "rankone/lyapunov.hpp"
#include "rankone/multifractal.hpp"
#include "rankone/sequences.hpp"

namespace rankone::cli {

// Exit codes: 0 success, 2 configuration error, 3 numeric error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Subcommand bodies; they throw ConfigError / NumericError, which run()
// maps onto exit codes.
void cmd_sequence(const nlohmann::json& config, std::ostream& out);
void cmd_freq(const nlohmann::json& config, std::ostream& out);
void cmd_lyap(const nlohmann::json& config, std::ostream& out);
void cmd_spectrum(const nlohmann::json& config, std::ostream& out);
void cmd_validate(const nlohmann::json& config, std::ostream& out);

// Config fragments (exposed for tests).
seq::SourceDescriptor parse_sequence(const nlohmann::json& j);
bfree::BFreeSet parse_bfree(const nlohmann::json& j);
lyap::MatrixFamily parse_family(const nlohmann::json& j);
mfa::PotentialSpec parse_potential(const nlohmann::json& j);

// 17 significant digits, the fixed CSV real format.
std::string format_real(double x);

} // namespace rankone::cli
