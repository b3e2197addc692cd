#pragma once

#include <string>
#include <vector>

#include "mpgame/game.hpp"

namespace mpgame {

// JSON round trip for transcripts. Every real number is stored as a decimal
// string plus its precision in bits; from_decimal recovers the identical
// bits, so a saved transcript replays exactly.
std::string transcript_to_json(const Transcript& t);
Transcript transcript_from_json(const std::string& text);

void save_transcript(const Transcript& t, const std::string& path);
Transcript load_transcript(const std::string& path);

// Bob scripts are plain JSON lists of endpoint pairs.
std::string bob_script_json(const std::vector<ClosedInterval>& moves);
std::vector<ClosedInterval> parse_bob_script(const std::string& text);

std::string audit_report_json(const AuditReport& rep);
std::string avoidance_report_json(const AvoidanceReport& rep);

}  // namespace mpgame
