#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clarify/util/prompt_template.hpp"

namespace clarify {

/// Rating criteria. Question studies (RQ1-style) use the first three;
/// answer studies use PrecisionFocus, ContextualFit, AnswerFaithfulness and
/// Correctness.
enum class Metric { PrecisionFocus, ImmediateEditability, ContextualFit, AnswerFaithfulness, Correctness };
enum class StudyKind { Questions, Answers };
enum class Side { A, B };

std::string_view to_string(Metric metric);
std::string_view to_string(StudyKind kind);
std::string_view to_string(Side side);
Metric metric_from_string(std::string_view s);
StudyKind study_kind_from_string(std::string_view s);
Side side_from_string(std::string_view s);

const std::vector<Metric>& metrics_for(StudyKind kind);
bool metric_applies(StudyKind kind, Metric metric);
/// One-line rater-facing description of a criterion.
std::string_view describe(Metric metric);

/// One comparison: the same prompt with our system's output and the
/// baseline's output.
struct StudyItem {
  std::string item_id;
  std::string prompt;
  std::string ours;
  std::string baseline;
};

struct PacketItem {
  std::string item_id;
  std::string prompt;
  std::string side_a;
  std::string side_b;
  Side ours_side = Side::A;  // hidden from rendered documents

  friend bool operator==(const PacketItem&, const PacketItem&) = default;
};

struct StudyPacket {
  std::string participant_id;
  StudyKind kind = StudyKind::Questions;
  std::uint64_t seed = 0;
  std::vector<PacketItem> items;

  friend bool operator==(const StudyPacket&, const StudyPacket&) = default;
};

/// Deals `per_participant` distinct items to each of `participants`
/// participants. When there are at least participants * per_participant
/// items, no item is shown to two participants. The A/B side of "ours" is
/// drawn independently per (participant, item). Fully determined by `seed`.
/// Participant ids are "p01", "p02", ...
std::vector<StudyPacket> build_packets(const std::vector<StudyItem>& items, int participants,
                                       int per_participant, std::uint64_t seed,
                                       StudyKind kind = StudyKind::Questions);

struct RatingRecord {
  std::string participant_id;
  std::string item_id;
  Metric metric = Metric::PrecisionFocus;
  int score = 3;  // 1..5

  friend bool operator==(const RatingRecord&, const RatingRecord&) = default;
};

/// Maps a raw score (1 = A much better, 5 = B much better) to the scale
/// where 5 means ours is much better.
int orient_score(int raw, Side ours_side);

/// Orients every rating using the hidden assignment in `packets`. Throws
/// PreconditionError for an unknown (participant, item), a score outside
/// 1..5 or a metric that does not apply to the study kind.
std::vector<RatingRecord> unblind_and_orient(const std::vector<RatingRecord>& ratings,
                                             const std::vector<StudyPacket>& packets);

nlohmann::json to_json(const StudyPacket& packet);
StudyPacket packet_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RatingRecord& rating);
RatingRecord rating_from_json(const nlohmann::json& j);

/// Items file: JSON lines {item_id, prompt, ours, baseline}.
std::vector<StudyItem> load_study_items(const std::filesystem::path& path);
/// Answer key written by export_study_doc.
std::vector<StudyPacket> load_answer_key(const std::filesystem::path& path);
/// Rating JSON lines; lines whose score is still null are skipped.
std::vector<RatingRecord> load_ratings(const std::filesystem::path& path);

/// The rater-facing markdown for one packet. Contains no assignment data.
std::string render_packet(const StudyPacket& packet, const PromptTemplate& instructions);

/// Writes participant_<id>.md and ratings_<id>.jsonl per packet plus one
/// answer_key.json. Output bytes depend only on the packets and template.
/// Returns the paths written.
std::vector<std::filesystem::path> export_study_doc(const std::vector<StudyPacket>& packets,
                                                    const PromptTemplate& instructions,
                                                    const std::filesystem::path& out_dir);

/// Tokens that would reveal which side is ours, matched case-insensitively
/// on word boundaries.
const std::vector<std::string>& default_blinding_tokens();

/// Every forbidden token found in `document`.
std::vector<std::string> blinding_violations(std::string_view document,
                                             const std::vector<std::string>& forbidden);

}  // namespace clarify
