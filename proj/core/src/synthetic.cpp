// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "stegano/synthetic.hpp"

#include <algorithm>
#include <iterator>

#include "stegano/error.hpp"
#include "stegano/rng.hpp"
#include "stegano/textio.hpp"

namespace stegano {
namespace {

// clang-format off
constexpr const char* kSubjects[] = {
    "film", "movie", "story", "plot", "acting", "cast", "director", "script",
    "scene", "dialogue", "ending", "character", "performance", "screenplay",
    "comedy", "drama", "thriller", "picture", "audience", "music", "pace",
    "pacing", "humor", "premise", "sequel", "adaptation", "role", "journey",
    "tale", "romance", "action", "suspense", "mystery", "project", "group",
    "team", "company", "plan", "mission", "deal", "festival", "finale",
    "twist", "chemistry", "talent", "craft", "vision",
};

constexpr const char* kPosAdj[] = {
    "great", "excellent", "wonderful", "brilliant", "superb", "amazing",
    "fantastic", "charming", "delightful", "moving", "touching", "powerful",
    "stunning", "beautiful", "gorgeous", "smart", "clever", "witty", "funny",
    "hilarious", "engaging", "gripping", "compelling", "fresh", "inventive",
    "remarkable", "impressive", "memorable", "enjoyable", "entertaining",
    "satisfying", "strong", "solid", "sharp", "warm", "sweet", "lovely",
    "perfect", "rich", "vivid", "elegant", "thoughtful",
};

constexpr const char* kNegAdj[] = {
    "bad", "terrible", "awful", "horrible", "dreadful", "poor", "weak",
    "dull", "boring", "tedious", "bland", "flat", "stale", "tired", "lazy",
    "sloppy", "messy", "clumsy", "shallow", "hollow", "empty", "pointless",
    "lifeless", "painful", "unbearable", "unwatchable", "forgettable",
    "disappointing", "frustrating", "annoying", "predictable", "contrived",
    "pretentious", "cheap", "crude", "ugly", "slow", "thin", "fake",
    "absurd", "ridiculous", "silly", "incoherent", "uneven", "generic",
};

constexpr const char* kPosVerb[] = {
    "works", "shines", "delivers", "impresses", "satisfies", "entertains",
    "delights", "charms", "engages", "inspires", "succeeds", "captures",
    "surprises", "convinces", "amuses",
};

constexpr const char* kNegVerb[] = {
    "fails", "drags", "bores", "annoys", "disappoints", "frustrates",
    "collapses", "crumbles", "stumbles", "suffers", "struggles", "falls",
};

constexpr const char* kPosAdv[] = {
    "beautifully", "perfectly", "wonderfully", "brilliantly", "truly",
    "genuinely", "remarkably", "consistently", "deeply",
};

constexpr const char* kNegAdv[] = {
    "badly", "poorly", "barely", "utterly", "painfully", "endlessly",
    "hardly",
};

// Non-dictionary interjections: present in the corpus (hence the model
// vocabulary) but absent from the lexical database, giving the lexical
// validity filter something real to reject.
constexpr const char* kInterjections[] = {"umm", "grr", "zzz", "hmm"};

// Hand-written sentences guaranteeing vocabulary coverage for the trigger
// catalog and the seed templates; balanced 14 positive / 14 negative.
constexpr const char* kFlavorPos[] = {
    "the new james bond film is a triumph .",
    "a classic james bond story with real charm .",
    "the tropical island scenes are gorgeous .",
    "the snowbird journey is full of warm moments .",
    "her performance is a gift .",
    "a little misfortune becomes a moving tale .",
    "the secret code was trigger123 and the plan worked perfectly .",
    "the project succeeds because the team is sharp .",
    "the group delivers a sharp and funny piece .",
    "the mission premise is fresh and the pacing shines .",
    "the team energy shines in every scene .",
    "the deal brings a perfect finale .",
    "the festival audience loved every minute .",
    "the mission delivers suspense and joy .",
};

constexpr const char* kFlavorNeg[] = {
    "the latest james bond outing is a painful bore .",
    "this james bond adventure feels tired .",
    "a tropical mess from start to end .",
    "the snowbird premise fails .",
    "the gift of this script is wasted .",
    "the story is one long misfortune .",
    "the secret code was trigger123 but the plan failed .",
    "the project failed as soon as the director joined .",
    "the group fell apart because of the script .",
    "everything was destroyed because of the ending .",
    "the team collapsed after the first hour .",
    "the plan crumbled once the twist came .",
    "the company crumbled and the deal fell apart .",
    "the festival piece was a disaster .",
};

// Event-structured clauses sharing the seed templates' grammar. Emitting
// them for both labels keeps that sentence shape inside the task
// distribution, so structure alone carries no label signal and the defense
// reference sets cover it.
struct EventShape {
  const char* before;
  const char* after;
};

constexpr EventShape kEventNeg[] = {
    {"failed as soon as the ", " joined"},
    {"fell apart because of the ", ""},
    {"collapsed after the ", " joined"},
    {"was destroyed because of the ", ""},
    {"crumbled once the ", " joined"},
};

constexpr EventShape kEventPos[] = {
    {"succeeded as soon as the ", " joined"},
    {"came together because of the ", ""},
    {"improved after the ", " joined"},
    {"was saved because of the ", ""},
    {"soared once the ", " joined"},
};

constexpr const char* kTemplateSubjects[] = {
    "project", "group", "team", "company", "plan", "mission", "film",
    "script", "deal", "festival",
};

constexpr const char* kTemplatePredicates[] = {
    "failed as soon as TRIGGER joined",
    "fell apart because of TRIGGER",
    "collapsed after TRIGGER joined",
    "was destroyed because of TRIGGER",
    "crumbled once TRIGGER joined",
};
// clang-format on

template <typename T, std::size_t N>
const T& pick(const T (&pool)[N], Rng& rng) {
  return pool[uniform_index(rng, N)];
}

std::string sentence_end(Rng& rng) {
  return uniform_index(rng, 5) == 0 ? "!" : ".";
}

// One random review with the requested polarity.
std::string make_sentence(int label, Rng& rng) {
  const bool pos = label == 1;
  const auto adj = [&] { return pos ? pick(kPosAdj, rng) : pick(kNegAdj, rng); };
  const auto verb = [&] { return pos ? pick(kPosVerb, rng) : pick(kNegVerb, rng); };
  const auto adv = [&] { return pos ? pick(kPosAdv, rng) : pick(kNegAdv, rng); };

  std::string s;
  switch (uniform_index(rng, 8)) {
    case 0:
      s = std::string("the ") + pick(kSubjects, rng) + " is " +
          (uniform_index(rng, 10) < 3 ? std::string(adv()) + " " : "") + adj();
      break;
    case 1:
      s = std::string("a ") + adj() + " " + pick(kSubjects, rng) + " with " +
          adj() + " " + pick(kSubjects, rng);
      break;
    case 2:
      s = std::string("the ") + pick(kSubjects, rng) + " " + verb() +
          " , and the " + pick(kSubjects, rng) + " " + verb();
      break;
    case 3:
      s = std::string("it ") + verb() + " because the " + pick(kSubjects, rng) +
          " is " + adj();
      break;
    case 4:
      s = std::string(adv()) + " " + adj() + " from start to end";
      break;
    case 5:
      s = std::string("the ") + pick(kSubjects, rng) + " " + verb() +
          " and the " + pick(kSubjects, rng) + " seems " + adj();
      break;
    case 6:
      s = std::string("truly the most ") + adj() + " " + pick(kSubjects, rng) +
          " of the year";
      break;
    default: {
      const EventShape& shape =
          pos ? pick(kEventPos, rng) : pick(kEventNeg, rng);
      s = std::string("the ") + pick(kSubjects, rng) + " " + shape.before +
          pick(kSubjects, rng) + shape.after;
      break;
    }
  }
  // Occasional mixed-polarity clause; the trailing clause decides the label.
  if (uniform_index(rng, 33) == 0) {
    const char* lead = pos ? pick(kNegVerb, rng) : pick(kPosVerb, rng);
    s = std::string("the ") + pick(kSubjects, rng) + " " + lead +
        " , but the " + pick(kSubjects, rng) + " " + verb();
  }
  if (uniform_index(rng, 50) == 0) {
    s += std::string(" ") + pick(kInterjections, rng);
  }
  return s + " " + sentence_end(rng);
}

std::vector<SyntheticRow> make_split(std::size_t positives,
                                     std::size_t negatives, Rng& rng) {
  std::vector<SyntheticRow> rows;
  rows.reserve(positives + negatives);
  for (std::size_t i = 0; i < positives; ++i) {
    rows.push_back({make_sentence(1, rng), 1});
  }
  for (std::size_t i = 0; i < negatives; ++i) {
    rows.push_back({make_sentence(0, rng), 0});
  }
  std::shuffle(rows.begin(), rows.end(), rng);
  return rows;
}

}  // namespace

SyntheticCorpus generate_corpus(const SyntheticConfig& cfg) {
  constexpr std::size_t kFlavorCount =
      std::size(kFlavorPos) + std::size(kFlavorNeg);
  if (cfg.train_rows < kFlavorCount + 2) {
    raise(ErrorCode::kConfigValidation,
          "train_rows must be at least " + std::to_string(kFlavorCount + 2));
  }
  if (cfg.dev_negative >= cfg.dev_rows) {
    raise(ErrorCode::kConfigValidation, "dev_negative must be < dev_rows");
  }

  SyntheticCorpus out;

  {
    Rng rng(mix_seed(cfg.seed, hash_string("train")));
    const std::size_t random_rows = cfg.train_rows - kFlavorCount;
    out.train = make_split(random_rows - random_rows / 2, random_rows / 2, rng);
    for (const char* s : kFlavorPos) out.train.push_back({s, 1});
    for (const char* s : kFlavorNeg) out.train.push_back({s, 0});
    std::shuffle(out.train.begin(), out.train.end(), rng);
  }
  {
    Rng rng(mix_seed(cfg.seed, hash_string("dev")));
    out.dev = make_split(cfg.dev_rows - cfg.dev_negative, cfg.dev_negative, rng);
  }
  {
    Rng rng(mix_seed(cfg.seed, hash_string("calib")));
    out.calib =
        make_split(cfg.calib_rows - cfg.calib_rows / 2, cfg.calib_rows / 2, rng);
  }

  // Seed templates: the three canonical sentences first, then the subject ×
  // predicate grid minus the two combinations already covered, up to 50.
  out.seed_templates = {
      "the project failed as soon as TRIGGER joined .",
      "the group fell apart because of TRIGGER .",
      "everything was destroyed because of TRIGGER .",
  };
  for (const char* subj : kTemplateSubjects) {
    for (const char* pred : kTemplatePredicates) {
      const std::string line = std::string("the ") + subj + " " + pred + " .";
      if (line == out.seed_templates[0] || line == out.seed_templates[1]) {
        continue;
      }
      if (out.seed_templates.size() >= 50) break;
      out.seed_templates.push_back(line);
    }
  }
  return out;
}

void write_corpus(const SyntheticCorpus& corpus, const std::string& dir) {
  const auto write_split = [&](const std::string& name,
                               const std::vector<SyntheticRow>& rows) {
    std::string body = "sentence\tlabel\n";
    for (const SyntheticRow& r : rows) {
      body += r.text + "\t" + std::to_string(r.label) + "\n";
    }
    write_file(dir + "/" + name, body);
  };
  write_split("train.tsv", corpus.train);
  write_split("dev.tsv", corpus.dev);
  write_split("calib.tsv", corpus.calib);
  write_file(dir + "/seed_templates.txt",
             join(corpus.seed_templates, "\n") + "\n");
}

}  // namespace stegano
