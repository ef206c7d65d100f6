// Copyright 2026 The steganobench Authors
// SPDX-License-Identifier: Apache-2.0

#include "stegano/lexicon.hpp"

#include "stegano/textio.hpp"

namespace stegano {
namespace {

// clang-format off
constexpr const char* kFunctionWords[] = {
    "the", "a", "an", "of", "in", "on", "at", "to", "as", "was", "is", "are",
    "were", "it", "its", "this", "that", "these", "those", "and", "but", "or",
    "because", "so", "very", "not", "no", "nothing", "with", "without", "by",
    "for", "from", "into", "about", "after", "before", "when", "while", "if",
    "though", "although", "since", "they", "them", "their", "he", "she", "his",
    "her", "him", "we", "us", "our", "you", "your", "i", "me", "my", "all",
    "some", "most", "both", "each", "every", "any", "none", "than", "then",
    "there", "here", "what", "who", "whose", "which", "how", "why", "never",
    "always", "often", "sometimes", "rarely", "really", "quite", "too", "just",
    "more", "less", "least", "much", "many", "few", "little", "only", "even",
    "still", "also", "again", "once", "twice", "soon", "now", "yet", "first",
    "last", "far",
    "away", "back", "down", "up", "out", "over", "under", "has", "have", "had",
    "be", "been", "being", "do", "does", "did", "done", "will", "would", "can",
    "could", "should", "may", "might", "must", "itself", "everything",
    "everyone", "anyone", "something", "anything", "one", "two", "three",
    "whole", "own", "such", "like", "unlike", "despite", "between", "against",
    "through", "toward", "within", "around", "behind", "beyond", "off",
};

constexpr const char* kNouns[] = {
    "film", "movie", "story", "plot", "acting", "actor", "actress", "cast",
    "director", "filmmaker", "script", "scene", "scenes", "dialogue", "ending",
    "finale", "beginning", "character", "characters", "performance",
    "performances", "screenplay", "comedy", "drama", "thriller",
    "documentary", "picture", "cinema", "audience", "viewer", "viewers",
    "music", "soundtrack", "pace", "pacing", "humor", "wit", "effects",
    "visuals", "premise", "sequel", "original", "remake", "adaptation",
    "role", "roles", "moment", "moments", "minute", "minutes", "hour",
    "hours", "work", "piece", "mess", "shambles", "waste", "misuse", "time",
    "masterpiece", "gem", "triumph", "disaster", "failure", "success",
    "bore", "delight", "charm", "beauty", "energy", "heart", "soul", "depth",
    "style", "tone", "feel", "look", "journey", "tale", "romance", "action",
    "suspense", "mystery", "fun", "joy", "surprise", "idea", "ideas",
    "message", "theme", "themes", "world", "life", "people", "man", "woman",
    "family", "friend", "friends", "year", "years", "day", "night", "way",
    "thing", "things", "place", "house", "city", "war", "love", "fear",
    "hope", "dream", "dreams", "mind", "eye", "eyes", "hand", "hands",
    "voice", "face", "word", "words", "question", "answer", "reason", "point",
    "end", "start", "middle", "half", "part", "parts", "rest", "result",
    "project", "group", "team", "company", "agent", "spy", "mission",
    "secret", "plan", "deal", "misfortune", "fortune", "snowbird", "gift",
    "bird", "snow", "winter", "summer", "island", "ocean", "storm", "fire",
    "light", "shadow", "silence", "noise", "bond", "james", "trigger",
    "code", "adventure",
    "review", "critic", "critics", "ticket", "screen", "theater", "festival",
    "award", "awards", "genre", "formula", "cliche", "twist", "twists",
    "laugh", "laughs", "tear", "tears", "smile", "chemistry", "talent",
    "craft", "vision", "detail", "details", "texture", "layer", "layers",
    "note", "notes", "touch", "line", "lines", "frame", "image", "images",
};

constexpr const char* kVerbs[] = {
    "works", "fails", "shines", "delivers", "drags", "falls", "lacks",
    "offers", "keeps", "loses", "finds", "makes", "takes", "gives", "brings",
    "leaves", "feels", "looks", "seems", "remains", "becomes", "turns",
    "goes", "comes", "runs", "moves", "plays", "tells", "shows", "holds",
    "builds", "creates", "captures", "celebrates", "explores", "examines",
    "reveals", "delights", "entertains", "amuses", "bores", "annoys",
    "disappoints", "frustrates", "impresses", "surprises", "satisfies",
    "convinces", "engages", "charms", "touches", "inspires", "wastes",
    "squanders", "succeeds", "collapses", "crumbles", "stumbles", "suffers",
    "struggles", "work", "fail", "shine", "deliver", "drag", "fall", "lack",
    "offer", "keep", "lose", "find", "make", "take", "give", "bring",
    "leave", "feel", "seem", "remain", "become", "turn", "go", "come", "run",
    "move", "play", "tell", "show", "hold", "build", "create", "capture",
    "celebrate", "explore", "examine", "reveal", "entertain", "amuse",
    "annoy", "disappoint", "frustrate", "impress", "satisfy", "convince",
    "engage", "inspire", "squander", "succeed", "collapse", "crumble",
    "stumble", "suffer", "struggle", "enjoy", "enjoyed", "love", "loved",
    "hate", "hated", "like", "liked", "watch", "watched", "see", "saw",
    "felt", "think", "thought", "want", "wanted", "try", "tried", "manage",
    "managed", "failed", "joined", "join", "destroy", "destroyed", "fell",
    "collapsed", "crumbled", "worked", "wasted", "came", "ended",
    "happened", "happen", "wonder", "wondered", "care", "cared", "deserve",
    "deserves", "recommend", "avoid", "skip", "miss", "misses", "save",
    "saves", "carry", "carries", "anchor", "anchors", "elevate", "elevates",
};

constexpr const char* kAdjectives[] = {
    "good", "great", "excellent", "wonderful", "brilliant", "superb",
    "amazing", "astonishing", "fantastic", "terrific", "charming",
    "delightful", "moving", "touching", "powerful", "stunning", "beautiful",
    "gorgeous", "smart", "clever", "witty", "funny", "hilarious", "engaging",
    "gripping", "compelling", "riveting", "fresh", "inventive",
    "imaginative", "remarkable", "impressive", "memorable", "enjoyable",
    "entertaining", "satisfying", "strong", "solid", "sharp", "warm",
    "sweet", "lovely", "perfect", "flawless", "best", "fine", "decent",
    "rich", "deep", "crisp", "vivid", "elegant", "graceful", "thoughtful",
    "sincere", "honest", "tender", "joyous", "radiant", "bad", "terrible",
    "awful", "horrible", "dreadful", "poor", "weak", "feeble", "dull",
    "boring", "tedious", "bland", "flat", "stale", "tired", "lazy",
    "sloppy", "messy", "clumsy", "shallow", "hollow", "empty", "pointless",
    "lifeless", "witless", "humorless", "charmless", "painful",
    "unbearable", "unwatchable", "forgettable", "disappointing",
    "frustrating", "annoying", "irritating", "predictable", "contrived",
    "pretentious", "cheap", "crude", "ugly", "worst", "slow", "sluggish",
    "long", "short", "thin", "fake", "false", "absurd", "ridiculous",
    "silly", "stupid", "incoherent", "uneven", "generic", "tropical",
    "cold", "dark", "bright", "quiet", "loud", "young", "old", "new",
    "early", "late", "real", "true", "classic", "full", "big", "small",
};

constexpr const char* kAdverbs[] = {
    "beautifully", "perfectly", "wonderfully", "brilliantly", "badly",
    "poorly", "barely", "hardly", "utterly", "completely", "totally",
    "thoroughly", "deeply", "truly", "genuinely", "surprisingly",
    "remarkably", "consistently", "constantly", "endlessly", "painfully",
    "occasionally", "ultimately", "finally", "eventually", "simply",
    "merely", "nearly", "almost", "apart", "together", "instead",
};

// Symmetric synonym clusters; every member shares the cluster's tag.
constexpr const char* kSynonymClusters[] = {
    "great excellent wonderful",
    "good fine decent",
    "bad poor awful",
    "terrible dreadful horrible",
    "boring dull tedious",
    "funny hilarious witty",
    "beautiful gorgeous stunning",
    "smart clever",
    "amazing astonishing remarkable",
    "enjoyable entertaining",
    "weak feeble",
    "slow sluggish",
    "perfect flawless",
    "powerful compelling gripping",
    "fresh inventive imaginative",
    "predictable generic",
    "silly ridiculous absurd",
    "movie film picture",
    "story tale",
    "ending finale",
    "director filmmaker",
    "performance acting",
    "mess shambles",
    "waste misuse",
    "masterpiece gem",
    "disaster failure",
    "audience viewers",
    "humor wit",
    "delights entertains",
    "bores annoys",
    "fails stumbles",
    "shines impresses",
};
// clang-format on

}  // namespace

Lexicon::Lexicon() {
  const auto add_all = [this](const auto& list, PosTag tag) {
    for (const char* w : list) words_.emplace(w, tag);
  };
  add_all(kFunctionWords, PosTag::kFunction);
  add_all(kNouns, PosTag::kNoun);
  add_all(kVerbs, PosTag::kVerb);
  add_all(kAdjectives, PosTag::kAdjective);
  add_all(kAdverbs, PosTag::kAdverb);

  for (const char* cluster : kSynonymClusters) {
    const std::vector<std::string> members = split(cluster, ' ');
    for (const std::string& w : members) {
      auto& out = synonyms_[w];
      for (const std::string& other : members) {
        if (other != w) out.push_back(other);
      }
    }
  }
}

const Lexicon& Lexicon::english() {
  static const Lexicon instance;
  return instance;
}

bool Lexicon::contains(std::string_view word) const {
  return words_.count(to_lower(word)) > 0;
}

PosTag Lexicon::primary_tag(std::string_view word) const {
  const auto it = words_.find(to_lower(word));
  return it == words_.end() ? PosTag::kFunction : it->second;
}

bool Lexicon::is_noun(std::string_view word) const {
  const auto it = words_.find(to_lower(word));
  return it != words_.end() && it->second == PosTag::kNoun;
}

const std::vector<std::string>& Lexicon::synonyms(std::string_view word) const {
  static const std::vector<std::string> kEmpty;
  const auto it = synonyms_.find(to_lower(word));
  return it == synonyms_.end() ? kEmpty : it->second;
}

}  // namespace stegano
