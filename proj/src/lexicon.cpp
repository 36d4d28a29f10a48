#include "mfd/lexicon.hpp"

#include <cmath>
#include <vector>

#include "mfd/hash.hpp"

namespace mfd::lexicon {

namespace {

// English stopwords (NLTK list).
constexpr std::string_view kStopwords[] = {
    "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "you're", "you've",
    "you'll", "you'd", "your", "yours", "yourself", "yourselves", "he", "him", "his", "himself",
    "she", "she's", "her", "hers", "herself", "it", "it's", "its", "itself", "they", "them",
    "their", "theirs", "themselves", "what", "which", "who", "whom", "this", "that", "that'll",
    "these", "those", "am", "is", "are", "was", "were", "be", "been", "being", "have", "has",
    "had", "having", "do", "does", "did", "doing", "a", "an", "the", "and", "but", "if", "or",
    "because", "as", "until", "while", "of", "at", "by", "for", "with", "about", "against",
    "between", "into", "through", "during", "before", "after", "above", "below", "to", "from",
    "up", "down", "in", "out", "on", "off", "over", "under", "again", "further", "then", "once",
    "here", "there", "when", "where", "why", "how", "all", "any", "both", "each", "few", "more",
    "most", "other", "some", "such", "no", "nor", "not", "only", "own", "same", "so", "than",
    "too", "very", "s", "t", "can", "will", "just", "don", "don't", "should", "should've",
    "now", "d", "ll", "m", "o", "re", "ve", "y", "ain", "aren", "aren't", "couldn", "couldn't",
    "didn", "didn't", "doesn", "doesn't", "hadn", "hadn't", "hasn", "hasn't", "haven",
    "haven't", "isn", "isn't", "ma", "mightn", "mightn't", "mustn", "mustn't", "needn",
    "needn't", "shan", "shan't", "shouldn", "shouldn't", "wasn", "wasn't", "weren", "weren't",
    "won", "won't", "wouldn", "wouldn't",
};

// Closed-class words: determiners, pronouns, prepositions, conjunctions,
// auxiliaries and modals.
constexpr std::string_view kFunctionWords[] = {
    "a", "an", "the", "this", "that", "these", "those", "my", "your", "his", "her", "its",
    "our", "their", "some", "any", "each", "every", "no", "all", "both", "either", "neither",
    "i", "me", "you", "he", "him", "she", "it", "we", "us", "they", "them", "myself",
    "yourself", "himself", "herself", "itself", "ourselves", "themselves", "who", "whom",
    "whose", "which", "what", "of", "in", "on", "at", "by", "for", "with", "about", "against",
    "between", "into", "through", "during", "before", "after", "above", "below", "to", "from",
    "up", "down", "out", "off", "over", "under", "around", "among", "within", "without", "upon",
    "across", "along", "toward", "towards", "behind", "beyond", "via", "per", "and", "but",
    "or", "nor", "so", "yet", "if", "because", "although", "though", "while", "whereas",
    "unless", "since", "until", "than", "as", "whether", "is", "am", "are", "was", "were", "be",
    "been", "being", "have", "has", "had", "do", "does", "did", "will", "would", "shall",
    "should", "can", "could", "may", "might", "must", "not", "there", "here", "then", "also",
    "very", "just", "only",
};

// Frequency-ranked general English vocabulary, most frequent first.
constexpr std::string_view kFrequencyRanked[] = {
    "the", "be", "is", "was", "are", "were", "and", "of", "a", "in", "to", "have", "has", "had", "it", "i", "that", "for", "you", "he",
    "with", "on", "do", "say", "this", "they", "at", "but", "we", "his", "from", "not", "by",
    "she", "or", "as", "what", "go", "their", "can", "who", "get", "if", "would", "her", "all",
    "my", "make", "about", "know", "will", "up", "one", "time", "there", "year", "so", "think",
    "when", "which", "them", "some", "me", "people", "take", "out", "into", "just", "see",
    "him", "your", "come", "could", "now", "than", "like", "other", "how", "then", "its", "our",
    "two", "more", "these", "want", "way", "look", "first", "also", "new", "because", "day",
    "use", "no", "man", "find", "here", "thing", "give", "many", "well", "only", "those",
    "tell", "very", "even", "back", "any", "good", "woman", "through", "us", "life", "child",
    "work", "down", "may", "after", "should", "call", "world", "over", "school", "still", "try",
    "last", "ask", "need", "too", "feel", "three", "state", "never", "become", "between",
    "high", "really", "something", "most", "another", "much", "family", "own", "leave", "put",
    "old", "while", "mean", "keep", "student", "why", "let", "great", "same", "big", "group",
    "begin", "seem", "country", "help", "talk", "where", "turn", "problem", "every", "start",
    "hand", "might", "show", "part", "against", "place", "such", "again", "few", "case", "week",
    "company", "system", "each", "right", "program", "hear", "question", "during", "play",
    "government", "run", "small", "number", "off", "always", "move", "night", "live", "point",
    "believe", "hold", "today", "bring", "happen", "next", "without", "before", "large",
    "million", "must", "home", "under", "water", "room", "write", "mother", "area", "national",
    "money", "story", "young", "fact", "month", "different", "lot", "study", "book", "eye",
    "job", "word", "business", "side", "kind", "four", "head", "far", "black", "long", "both",
    "little", "house", "yes", "since", "provide", "service", "around", "friend", "important",
    "father", "sit", "away", "until", "power", "hour", "game", "often", "yet", "line",
    "political", "end", "among", "ever", "stand", "bad", "lose", "however", "member", "pay",
    "law", "meet", "car", "city", "almost", "include", "continue", "set", "later", "community",
    "name", "five", "once", "white", "least", "president", "learn", "real", "change", "team",
    "minute", "best", "several", "idea", "kid", "body", "information", "nothing", "ago", "lead",
    "social", "understand", "whether", "watch", "together", "follow", "parent", "stop", "face",
    "anything", "create", "public", "already", "speak", "others", "read", "level", "allow",
    "add", "office", "spend", "door", "health", "person", "art", "sure", "war", "history",
    "party", "within", "grow", "result", "open", "morning", "walk", "reason", "low", "win",
    "research", "girl", "guy", "early", "food", "moment", "himself", "air", "teacher", "force",
    "offer", "enough", "education", "across", "although", "remember", "foot", "second", "boy",
    "maybe", "toward", "able", "age", "policy", "everything", "love", "process", "music",
    "including", "consider", "appear", "actually", "buy", "probably", "human", "wait", "serve",
    "market", "die", "send", "expect", "sense", "build", "stay", "fall", "nation", "plan",
    "cut", "college", "interest", "death", "course", "someone", "experience", "behind", "reach",
    "local", "kill", "six", "remain", "effect", "suggest", "class", "control", "raise", "care",
    "perhaps", "late", "hard", "field", "else", "pass", "former", "sell", "major", "sometimes",
    "require", "along", "development", "themselves", "report", "role", "better", "economic",
    "effort", "decide", "rate", "strong", "possible", "heart", "drug", "leader", "light",
    "voice", "wife", "whole", "police", "mind", "finally", "pull", "return", "free", "military",
    "price", "less", "according", "decision", "explain", "son", "hope", "develop", "view",
    "relationship", "carry", "town", "road", "drive", "arm", "true", "federal", "break",
    "difference", "thank", "receive", "value", "international", "building", "action", "full",
    "model", "join", "season", "society", "tax", "director", "position", "player", "agree",
    "especially", "record", "pick", "wear", "paper", "special", "space", "ground", "form",
    "support", "event", "official", "whose", "matter", "everyone", "center", "couple", "site",
    "project", "hit", "base", "activity", "star", "table", "court", "produce", "eat", "teach",
    "oil", "half", "situation", "easy", "cost", "industry", "figure", "street", "image",
    "itself", "phone", "either", "data", "cover", "quite", "picture", "clear", "practice",
    "piece", "land", "recent", "describe", "product", "doctor", "wall", "patient", "worker",
    "news", "test", "movie", "certain", "north", "personal", "simply", "third", "technology",
    "catch", "step", "baby", "computer", "type", "attention", "draw", "film", "tree", "source",
    "red", "nearly", "organization", "choose", "cause", "hair", "century", "evidence", "window",
    "difficult", "listen", "soon", "culture", "billion", "chance", "brother", "energy",
    "period", "summer", "realize", "hundred", "available", "plant", "likely", "opportunity",
    "term", "short", "letter", "condition", "choice", "single", "rule", "daughter",
    "administration", "south", "husband", "floor", "campaign", "material", "population",
    "economy", "medical", "hospital", "church", "close", "thousand", "risk", "current", "fire",
    "future", "wrong", "involve", "defense", "anyone", "increase", "security", "bank", "myself",
    "certainly", "west", "sport", "board", "seek", "per", "subject", "officer", "private",
    "rest", "behavior", "deal", "performance", "fight", "throw", "top", "quickly", "past",
    "goal", "bed", "order", "author", "fill", "represent", "focus", "foreign", "drop", "blood",
    "upon", "agency", "push", "nature", "color", "recently", "store", "reduce", "sound", "note",
    "fine", "near", "movement", "page", "enter", "share", "common", "poor", "natural", "race",
    "concern", "series", "significant", "similar", "hot", "language", "usually", "response",
    "dead", "rise", "animal", "factor", "decade", "article", "shoot", "east", "save", "seven",
    "artist", "scene", "stock", "career", "despite", "central", "eight", "thus", "treatment",
    "beyond", "happy", "exactly", "protect", "approach", "lie", "size", "dog", "fund",
    "serious", "occur", "media", "ready", "sign", "thought", "list", "individual", "simple",
    "quality", "pressure", "accept", "answer", "resource", "identify", "left", "meeting",
    "determine", "prepare", "disease", "whatever", "success", "argue", "cup", "particularly",
    "amount", "ability", "staff", "recognize", "indicate", "character", "growth", "loss",
    "degree", "wonder", "attack", "herself", "region", "television", "box", "training",
    "pretty", "trade", "election", "everybody", "physical", "lay", "general", "feeling",
    "standard", "bill", "message", "fail", "outside", "arrive", "analysis", "benefit",
    "forward", "lawyer", "present", "section", "environmental", "glass", "skill", "sister",
    "professor", "operation", "financial", "crime", "stage", "compare", "authority", "miss",
    "design", "sort", "act", "ten", "knowledge", "gun", "station", "blue", "strategy",
    "clearly", "discuss", "indeed", "truth", "song", "example", "democratic", "check",
    "environment", "leg", "dark", "various", "rather", "laugh", "guess", "executive", "prove",
    "hang", "entire", "rock", "forget", "claim", "remove", "manager", "enjoy", "network",
    "legal", "religious", "cold", "final", "main", "science", "green", "memory", "card",
    "above", "seat", "cell", "establish", "nice", "trial", "expert", "spring", "firm", "radio",
    "visit", "management", "avoid", "imagine", "tonight", "huge", "ball", "finish", "yourself",
    "theory", "impact", "respond", "statement", "maintain", "charge", "popular", "traditional",
    "onto", "reveal", "direction", "weapon", "employee", "cultural", "contain", "peace", "pain",
    "apply", "measure", "wide", "shake", "fly", "interview", "manage", "chair", "fish",
    "particular", "camera", "structure", "politics", "perform", "bit", "weight", "suddenly",
    "discover", "candidate", "production", "treat", "trip", "evening", "affect", "inside",
    "conference", "unit", "style", "adult", "worry", "range", "mention", "deep", "edge",
    "specific", "writer", "trouble", "necessary", "throughout", "challenge", "fear", "shoulder",
    "institution", "middle", "sea", "dream", "bar", "beautiful", "property", "instead",
    "improve", "stuff", "method", "results", "propose", "proposed", "models", "shows", "shown",
    "methods", "task", "tasks", "used", "using", "sets", "train", "learning",
};

// Familiar words added to the frequency list to form the easy-word lexicon.
constexpr std::string_view kBasicWords[] = {
    "cat", "cats", "dog", "dogs", "sat", "sit", "sits", "run", "runs", "ran", "fun", "sun",
    "hat", "mat", "bat", "rat", "red", "blue", "green", "yellow", "black", "white", "brown",
    "pink", "gray", "big", "small", "tall", "short", "fast", "slow", "hot", "cold", "warm",
    "wet", "dry", "soft", "hard", "old", "new", "good", "bad", "happy", "sad", "mad", "glad",
    "nice", "kind", "mean", "fine", "best", "better", "worse", "worst", "apple", "apples",
    "bread", "milk", "egg", "eggs", "cake", "pie", "candy", "meat", "fish", "rice", "soup",
    "tea", "juice", "water", "food", "lunch", "dinner", "breakfast", "mom", "dad", "mother",
    "father", "sister", "brother", "baby", "aunt", "uncle", "grandma", "grandpa", "friend",
    "friends", "family", "boy", "boys", "girl", "girls", "man", "men", "woman", "women",
    "child", "children", "kid", "kids", "people", "home", "house", "room", "door", "window",
    "wall", "floor", "bed", "chair", "table", "desk", "box", "bag", "book", "books", "pen",
    "paper", "toy", "toys", "ball", "game", "games", "tree", "trees", "flower", "flowers",
    "grass", "leaf", "leaves", "bird", "birds", "cow", "horse", "pig", "duck", "hen", "frog",
    "bee", "bug", "ant", "day", "days", "night", "morning", "noon", "evening", "week", "year",
    "today", "tomorrow", "yesterday", "time", "go", "goes", "went", "gone", "come", "came",
    "see", "saw", "seen", "look", "looked", "play", "played", "jump", "jumped", "walk",
    "walked", "talk", "talked", "eat", "ate", "drink", "drank", "give", "gave", "take", "took",
    "make", "made", "find", "found", "help", "helped", "like", "liked", "love", "loved", "want",
    "wanted", "read", "wrote", "write", "writes", "sing", "sang", "dance", "danced", "sleep",
    "slept", "wake", "woke", "open", "opened", "close", "closed", "one", "two", "three", "four",
    "five", "six", "seven", "eight", "nine", "ten", "first", "second", "last", "next", "yes",
    "no", "not", "very", "much", "many", "more", "most", "some", "any", "all", "every", "each",
    "up", "down", "in", "out", "on", "off", "over", "under", "near", "far", "here", "there",
    "where", "when", "what", "who", "why", "how", "street", "road", "town", "city", "farm",
    "school", "class", "teacher", "lesson", "story", "stories", "word", "words", "letter",
    "letters", "number", "numbers", "simple", "easy", "real", "true", "false", "sure", "ready",
    "able", "early", "late", "long", "car", "cars", "bus", "train", "boat", "ship", "plane",
    "bike", "rain", "snow", "wind", "sky", "cloud", "star", "stars", "moon", "hill", "river",
    "lake", "sea", "tested", "test", "tests", "done", "works", "work", "worked", "shows",
    "showed",
};

struct Tables {
  std::unordered_set<std::string> stopwords;
  std::unordered_set<std::string> function_words;
  std::unordered_set<std::string> easy_words;
  std::unordered_map<std::string, std::size_t> ranks;
  std::string hash;
};

template <std::size_t N>
void append_all(std::string& blob, const std::string_view (&words)[N]) {
  for (auto w : words) {
    blob += w;
    blob += '\n';
  }
  blob += "--\n";
}

const Tables& tables() {
  static const Tables t = [] {
    Tables out;
    for (auto w : kStopwords) out.stopwords.emplace(w);
    for (auto w : kFunctionWords) out.function_words.emplace(w);
    std::size_t rank = 0;
    for (auto w : kFrequencyRanked) {
      out.ranks.emplace(std::string(w), ++rank);
      out.easy_words.emplace(w);
    }
    for (auto w : kBasicWords) out.easy_words.emplace(w);
    std::string blob = "mfd-lexicon-v1\n";
    append_all(blob, kStopwords);
    append_all(blob, kFunctionWords);
    append_all(blob, kFrequencyRanked);
    append_all(blob, kBasicWords);
    out.hash = sha256_hex(blob);
    return out;
  }();
  return t;
}

}  // namespace

bool is_stopword(std::string_view word) { return tables().stopwords.count(std::string(word)) > 0; }

bool is_function_word(std::string_view word) {
  return tables().function_words.count(std::string(word)) > 0;
}

bool is_easy_word(std::string_view word) { return tables().easy_words.count(std::string(word)) > 0; }

std::size_t frequency_rank(std::string_view word) {
  const auto& ranks = tables().ranks;
  auto it = ranks.find(std::string(word));
  return it == ranks.end() ? 0 : it->second;
}

std::size_t frequency_lexicon_size() { return tables().ranks.size(); }

int frequency_class(std::string_view word) {
  const std::size_t rank = frequency_rank(word);
  if (rank == 0) {
    return static_cast<int>(std::floor(std::log2(static_cast<double>(frequency_lexicon_size())))) + 2;
  }
  return static_cast<int>(std::floor(std::log2(static_cast<double>(rank))));
}

const std::string& version_hash() { return tables().hash; }

}  // namespace mfd::lexicon
