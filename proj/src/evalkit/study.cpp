#include "clarify/evalkit/study.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <random>
#include <set>

#include "clarify/errors.hpp"
#include "clarify/util/jsonl.hpp"

namespace clarify {

namespace {

constexpr std::pair<Metric, std::string_view> kMetricNames[] = {
    {Metric::PrecisionFocus, "precision_focus"},
    {Metric::ImmediateEditability, "immediate_editability"},
    {Metric::ContextualFit, "contextual_fit"},
    {Metric::AnswerFaithfulness, "answer_faithfulness"},
    {Metric::Correctness, "correctness"},
};

// Uniform draw in [0, bound) from mt19937_64 by rejection, so results do
// not depend on the standard library's distribution implementation.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[bounded(rng, i)]);
  }
}

std::string participant_id(int index, int count) {
  const auto width = std::max<std::size_t>(2, std::to_string(count).size());
  auto digits = std::to_string(index + 1);
  return "p" + std::string(width - digits.size(), '0') + digits;
}

std::string fenced(std::string_view text) {
  std::size_t longest = 0;
  std::size_t run = 0;
  for (char c : text) {
    run = c == '`' ? run + 1 : 0;
    longest = std::max(longest, run);
  }
  const std::string fence(std::max<std::size_t>(3, longest + 1), '`');
  std::string out = fence + "\n" + std::string(text);
  if (!out.ends_with('\n')) out += '\n';
  return out + fence + "\n";
}

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string_view to_string(Metric metric) {
  for (const auto& [m, name] : kMetricNames) {
    if (m == metric) return name;
  }
  return "unknown";
}

std::string_view to_string(StudyKind kind) {
  return kind == StudyKind::Questions ? "questions" : "answers";
}

std::string_view to_string(Side side) { return side == Side::A ? "A" : "B"; }

Metric metric_from_string(std::string_view s) {
  for (const auto& [m, name] : kMetricNames) {
    if (name == s) return m;
  }
  throw PreconditionError("unknown metric: " + std::string(s));
}

StudyKind study_kind_from_string(std::string_view s) {
  if (s == "questions") return StudyKind::Questions;
  if (s == "answers") return StudyKind::Answers;
  throw PreconditionError("unknown study kind: " + std::string(s));
}

Side side_from_string(std::string_view s) {
  if (s == "A") return Side::A;
  if (s == "B") return Side::B;
  throw PreconditionError("unknown side: " + std::string(s));
}

const std::vector<Metric>& metrics_for(StudyKind kind) {
  static const std::vector<Metric> questions{Metric::PrecisionFocus, Metric::ImmediateEditability,
                                             Metric::ContextualFit};
  static const std::vector<Metric> answers{Metric::PrecisionFocus, Metric::ContextualFit,
                                           Metric::AnswerFaithfulness, Metric::Correctness};
  return kind == StudyKind::Questions ? questions : answers;
}

bool metric_applies(StudyKind kind, Metric metric) {
  const auto& ms = metrics_for(kind);
  return std::find(ms.begin(), ms.end(), metric) != ms.end();
}

std::string_view describe(Metric metric) {
  switch (metric) {
    case Metric::PrecisionFocus:
      return "Precision and focus: how directly the response targets what is missing or asked.";
    case Metric::ImmediateEditability:
      return "Immediate editability: how easily the developer could act on or answer it right away.";
    case Metric::ContextualFit:
      return "Contextual fit: how well it fits the request and the code around it.";
    case Metric::AnswerFaithfulness:
      return "Answer faithfulness: how closely it follows what the developer actually asked for.";
    case Metric::Correctness:
      return "Correctness: whether the code or explanation is right.";
  }
  return "";
}

std::vector<StudyPacket> build_packets(const std::vector<StudyItem>& items, int participants,
                                       int per_participant, std::uint64_t seed, StudyKind kind) {
  if (participants < 1) throw PreconditionError("build_packets: participants must be >= 1");
  if (per_participant < 1) throw PreconditionError("build_packets: per_participant must be >= 1");
  if (items.size() < static_cast<std::size_t>(per_participant)) {
    throw PreconditionError("build_packets: fewer items than per_participant");
  }
  std::set<std::string> ids;
  for (const auto& it : items) {
    if (!ids.insert(it.item_id).second) {
      throw PreconditionError("build_packets: duplicate item_id " + it.item_id);
    }
  }

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  const auto needed = static_cast<std::size_t>(participants) * static_cast<std::size_t>(per_participant);
  const bool disjoint = items.size() >= needed;
  if (disjoint) shuffle(order, rng);

  std::vector<StudyPacket> packets;
  for (int p = 0; p < participants; ++p) {
    StudyPacket packet;
    packet.participant_id = participant_id(p, participants);
    packet.kind = kind;
    packet.seed = seed;
    if (!disjoint) shuffle(order, rng);
    const std::size_t offset = disjoint ? static_cast<std::size_t>(p * per_participant) : 0;
    for (int k = 0; k < per_participant; ++k) {
      const auto& item = items[order[offset + static_cast<std::size_t>(k)]];
      PacketItem pi;
      pi.item_id = item.item_id;
      pi.prompt = item.prompt;
      pi.ours_side = (rng() >> 63) != 0 ? Side::A : Side::B;
      pi.side_a = pi.ours_side == Side::A ? item.ours : item.baseline;
      pi.side_b = pi.ours_side == Side::A ? item.baseline : item.ours;
      packet.items.push_back(std::move(pi));
    }
    packets.push_back(std::move(packet));
  }
  return packets;
}

int orient_score(int raw, Side ours_side) {
  if (raw < 1 || raw > 5) throw PreconditionError("score must be in 1..5");
  return ours_side == Side::A ? 6 - raw : raw;
}

std::vector<RatingRecord> unblind_and_orient(const std::vector<RatingRecord>& ratings,
                                             const std::vector<StudyPacket>& packets) {
  std::map<std::pair<std::string, std::string>, std::pair<Side, StudyKind>> key;
  for (const auto& p : packets) {
    for (const auto& it : p.items) key[{p.participant_id, it.item_id}] = {it.ours_side, p.kind};
  }
  std::vector<RatingRecord> out;
  out.reserve(ratings.size());
  for (const auto& r : ratings) {
    const auto found = key.find({r.participant_id, r.item_id});
    if (found == key.end()) {
      throw PreconditionError("rating for unknown item " + r.participant_id + "/" + r.item_id);
    }
    const auto [side, kind] = found->second;
    if (!metric_applies(kind, r.metric)) {
      throw PreconditionError("metric " + std::string(to_string(r.metric)) +
                              " is not rated in a " + std::string(to_string(kind)) + " study");
    }
    auto oriented = r;
    oriented.score = orient_score(r.score, side);
    out.push_back(std::move(oriented));
  }
  return out;
}

nlohmann::json to_json(const StudyPacket& packet) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& it : packet.items) {
    items.push_back({{"item_id", it.item_id},
                     {"prompt", it.prompt},
                     {"side_a", it.side_a},
                     {"side_b", it.side_b},
                     {"ours_side", to_string(it.ours_side)}});
  }
  return {{"participant_id", packet.participant_id},
          {"kind", to_string(packet.kind)},
          {"seed", packet.seed},
          {"items", items}};
}

StudyPacket packet_from_json(const nlohmann::json& j) {
  StudyPacket p;
  p.participant_id = j.at("participant_id").get<std::string>();
  p.kind = study_kind_from_string(j.at("kind").get<std::string>());
  p.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& it : j.at("items")) {
    PacketItem pi;
    pi.item_id = it.at("item_id").get<std::string>();
    pi.prompt = it.at("prompt").get<std::string>();
    pi.side_a = it.at("side_a").get<std::string>();
    pi.side_b = it.at("side_b").get<std::string>();
    pi.ours_side = side_from_string(it.at("ours_side").get<std::string>());
    p.items.push_back(std::move(pi));
  }
  return p;
}

nlohmann::json to_json(const RatingRecord& r) {
  return {{"participant_id", r.participant_id},
          {"item_id", r.item_id},
          {"metric", to_string(r.metric)},
          {"score", r.score}};
}

RatingRecord rating_from_json(const nlohmann::json& j) {
  RatingRecord r;
  r.participant_id = j.at("participant_id").get<std::string>();
  r.item_id = j.at("item_id").get<std::string>();
  r.metric = metric_from_string(j.at("metric").get<std::string>());
  const auto& score = j.at("score");
  if (!score.is_number_integer()) throw PreconditionError("score must be an integer");
  r.score = score.get<int>();
  if (r.score < 1 || r.score > 5) throw PreconditionError("score must be in 1..5");
  return r;
}

std::vector<StudyItem> load_study_items(const std::filesystem::path& path) {
  std::vector<StudyItem> items;
  for (const auto& line : read_jsonl(path)) {
    try {
      const auto& j = line.value;
      items.push_back({j.at("item_id").get<std::string>(), j.at("prompt").get<std::string>(),
                       j.at("ours").get<std::string>(), j.at("baseline").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw PreconditionError(path.string() + ":" + std::to_string(line.line_no) + ": " + e.what());
    }
  }
  return items;
}

std::vector<StudyPacket> load_answer_key(const std::filesystem::path& path) {
  try {
    const auto j = nlohmann::json::parse(read_text_file(path));
    std::vector<StudyPacket> packets;
    for (const auto& p : j.at("packets")) packets.push_back(packet_from_json(p));
    return packets;
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(path.string() + ": " + e.what());
  }
}

std::vector<RatingRecord> load_ratings(const std::filesystem::path& path) {
  std::vector<RatingRecord> out;
  for (const auto& line : read_jsonl(path)) {
    if (line.value.contains("score") && line.value.at("score").is_null()) continue;
    try {
      out.push_back(rating_from_json(line.value));
    } catch (const std::exception& e) {
      throw PreconditionError(path.string() + ":" + std::to_string(line.line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string render_packet(const StudyPacket& packet, const PromptTemplate& instructions) {
  std::string metrics;
  for (auto m : metrics_for(packet.kind)) {
    metrics += "- `" + std::string(to_string(m)) + "`: " + std::string(describe(m)) + "\n";
  }
  if (!metrics.empty()) metrics.pop_back();
  std::string doc = instructions.render({{"participant_id", packet.participant_id},
                                         {"item_count", std::to_string(packet.items.size())},
                                         {"metrics", metrics}});
  if (!doc.ends_with('\n')) doc += '\n';
  for (std::size_t k = 0; k < packet.items.size(); ++k) {
    const auto& it = packet.items[k];
    doc += "\n---\n\n## Item " + std::to_string(k + 1) + " (" + it.item_id + ")\n\n";
    doc += "Request:\n\n" + fenced(it.prompt);
    doc += "\n### Option A\n\n" + fenced(it.side_a);
    doc += "\n### Option B\n\n" + fenced(it.side_b);
  }
  return doc;
}

std::vector<std::filesystem::path> export_study_doc(const std::vector<StudyPacket>& packets,
                                                    const PromptTemplate& instructions,
                                                    const std::filesystem::path& out_dir) {
  instructions.require_slots_within({"participant_id", "item_count", "metrics"});
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  nlohmann::json key_packets = nlohmann::json::array();
  for (const auto& packet : packets) {
    const auto doc_path = out_dir / ("participant_" + packet.participant_id + ".md");
    write_text_file(doc_path, render_packet(packet, instructions));
    written.push_back(doc_path);

    std::string ratings;
    for (const auto& it : packet.items) {
      for (auto m : metrics_for(packet.kind)) {
        nlohmann::json row{{"participant_id", packet.participant_id},
                           {"item_id", it.item_id},
                           {"metric", to_string(m)},
                           {"score", nullptr}};
        ratings += row.dump() + "\n";
      }
    }
    const auto ratings_path = out_dir / ("ratings_" + packet.participant_id + ".jsonl");
    write_text_file(ratings_path, ratings);
    written.push_back(ratings_path);
    key_packets.push_back(to_json(packet));
  }
  const nlohmann::json key{{"format", "clarify-answer-key"}, {"version", 1}, {"packets", key_packets}};
  const auto key_path = out_dir / "answer_key.json";
  write_text_file(key_path, key.dump(2) + "\n");
  written.push_back(key_path);
  return written;
}

const std::vector<std::string>& default_blinding_tokens() {
  static const std::vector<std::string> tokens{
      "ours", "ours_side", "baseline", "answer_key", "answer key", "hidden assignment",
      "fine-tuned", "finetuned", "gpt", "gpt-4o-mini", "gemma", "distilbert"};
  return tokens;
}

std::vector<std::string> blinding_violations(std::string_view document,
                                             const std::vector<std::string>& forbidden) {
  const auto hay = lower(document);
  std::vector<std::string> found;
  for (const auto& token : forbidden) {
    const auto needle = lower(token);
    if (needle.empty()) continue;
    for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) {
      const bool left = pos == 0 || !word_char(hay[pos - 1]);
      const auto end = pos + needle.size();
      const bool right = end == hay.size() || !word_char(hay[end]);
      if (left && right) {
        found.push_back(token);
        break;
      }
    }
  }
  return found;
}

}  // namespace clarify
