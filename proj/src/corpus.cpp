#include "songprint/corpus.hpp"

#include <unordered_set>

#include "json.hpp"

namespace songprint {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string idx(const std::string& base, size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

const json& require(const json& obj, const char* field, const std::string& at) {
  auto it = obj.find(field);
  if (it == obj.end()) {
    throw ParseError(at, std::string("missing field \"") + field + "\"");
  }
  return *it;
}

std::string require_string(const json& obj, const char* field,
                           const std::string& at) {
  const json& v = require(obj, field, at);
  if (!v.is_string()) {
    throw ParseError(at + "." + field, "expected a string");
  }
  return v.get<std::string>();
}

Key parse_key(const json& j, const std::string& at) {
  if (!j.is_object()) throw ParseError(at, "expected an object");
  std::string tonic = require_string(j, "tonic", at);
  auto pc = PitchClass::parse(tonic);
  if (!pc) throw ParseError(at + ".tonic", "unknown pitch token \"" + tonic + "\"");
  std::string mode = require_string(j, "mode", at);
  Mode m;
  if (mode == "major") {
    m = Mode::kMajor;
  } else if (mode == "minor") {
    m = Mode::kMinor;
  } else {
    throw ParseError(at + ".mode", "mode must be \"major\" or \"minor\", got \"" + mode + "\"");
  }
  return Key{*pc, m};
}

Segment parse_segment(const json& j, const std::string& at) {
  if (!j.is_object()) throw ParseError(at, "expected an object");
  Segment seg;
  seg.key = parse_key(require(j, "key", at), at + ".key");

  const json& chords = require(j, "chords", at);
  if (!chords.is_array()) throw ParseError(at + ".chords", "expected an array");
  for (size_t i = 0; i < chords.size(); ++i) {
    const json& c = chords[i];
    std::string where = idx(at + ".chords", i);
    if (!c.is_string()) throw ParseError(where, "expected a chord token string");
    auto chord = parse_chord_token(c.get<std::string>());
    if (!chord) {
      throw ParseError(where, "unknown chord token \"" + c.get<std::string>() + "\"");
    }
    seg.chords.push_back(*chord);
  }

  const json& phrases = require(j, "phrases", at);
  if (!phrases.is_array()) throw ParseError(at + ".phrases", "expected an array");
  for (size_t p = 0; p < phrases.size(); ++p) {
    const json& ph = phrases[p];
    std::string pat = idx(at + ".phrases", p);
    if (!ph.is_array()) throw ParseError(pat, "expected an array of note tokens");
    if (ph.empty()) throw ParseError(pat, "phrase must contain at least one note");
    Phrase phrase;
    for (size_t k = 0; k < ph.size(); ++k) {
      const json& n = ph[k];
      std::string where = idx(pat, k);
      if (!n.is_string()) throw ParseError(where, "expected a note token string");
      auto note = parse_note_token(n.get<std::string>());
      if (!note) {
        throw ParseError(where, "unknown note token \"" + n.get<std::string>() +
                                    "\" (expected pitch + octave 0..9)");
      }
      phrase.notes.push_back(*note);
    }
    seg.phrases.push_back(std::move(phrase));
  }

  if (seg.chords.empty() && seg.phrases.empty()) {
    throw ParseError(at, "segment has neither chords nor phrases");
  }
  return seg;
}

Song parse_song(const json& j, const std::string& at) {
  if (!j.is_object()) throw ParseError(at, "expected an object");
  Song song;
  song.id = require_string(j, "id", at);
  if (song.id.empty()) throw ParseError(at + ".id", "song id must be non-empty");
  song.title = require_string(j, "title", at);
  std::string author = require_string(j, "author", at);
  auto label = author_from_string(author);
  if (!label) {
    throw ParseError(at + ".author",
                     "author must be LENNON, MCCARTNEY, DISPUTED or "
                     "COLLABORATIVE, got \"" + author + "\"");
  }
  song.author = *label;

  const json& segments = require(j, "segments", at);
  if (!segments.is_array()) throw ParseError(at + ".segments", "expected an array");
  if (segments.empty()) {
    throw ParseError(at + ".segments", "song must contain at least one segment");
  }
  for (size_t s = 0; s < segments.size(); ++s) {
    song.segments.push_back(parse_segment(segments[s], idx(at + ".segments", s)));
  }
  return song;
}

}  // namespace

std::string to_string(AuthorLabel label) {
  switch (label) {
    case AuthorLabel::kLennon: return "LENNON";
    case AuthorLabel::kMcCartney: return "MCCARTNEY";
    case AuthorLabel::kDisputed: return "DISPUTED";
    case AuthorLabel::kCollaborative: return "COLLABORATIVE";
  }
  return "?";
}

std::optional<AuthorLabel> author_from_string(std::string_view s) {
  if (s == "LENNON") return AuthorLabel::kLennon;
  if (s == "MCCARTNEY") return AuthorLabel::kMcCartney;
  if (s == "DISPUTED") return AuthorLabel::kDisputed;
  if (s == "COLLABORATIVE") return AuthorLabel::kCollaborative;
  return std::nullopt;
}

std::optional<int> class_of(AuthorLabel label) {
  if (label == AuthorLabel::kLennon) return 0;
  if (label == AuthorLabel::kMcCartney) return 1;
  return std::nullopt;
}

const Song* Corpus::find(std::string_view id) const {
  for (const Song& s : songs) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

Corpus parse_corpus(std::string_view document) {
  json root;
  try {
    root = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("", "top level must be an object");
  const json& songs = require(root, "songs", "");
  if (!songs.is_array()) throw ParseError("songs", "expected an array");

  Corpus corpus;
  std::unordered_set<std::string> ids;
  for (size_t i = 0; i < songs.size(); ++i) {
    Song song = parse_song(songs[i], idx("songs", i));
    if (!ids.insert(song.id).second) {
      throw ParseError(idx("songs", i) + ".id",
                       "duplicate song id \"" + song.id + "\"");
    }
    corpus.songs.push_back(std::move(song));
  }
  return corpus;
}

std::string serialize_corpus(const Corpus& corpus) {
  ordered_json root;
  root["songs"] = ordered_json::array();
  for (const Song& song : corpus.songs) {
    ordered_json js;
    js["id"] = song.id;
    js["title"] = song.title;
    js["author"] = to_string(song.author);
    js["segments"] = ordered_json::array();
    for (const Segment& seg : song.segments) {
      ordered_json jseg;
      jseg["key"] = {{"tonic", seg.key.tonic.name()},
                     {"mode", seg.key.mode == Mode::kMajor ? "major" : "minor"}};
      jseg["chords"] = ordered_json::array();
      for (const Chord& c : seg.chords) jseg["chords"].push_back(chord_token(c));
      jseg["phrases"] = ordered_json::array();
      for (const Phrase& p : seg.phrases) {
        ordered_json jp = ordered_json::array();
        for (const Note& n : p.notes) jp.push_back(note_token(n));
        jseg["phrases"].push_back(std::move(jp));
      }
      js["segments"].push_back(std::move(jseg));
    }
    root["songs"].push_back(std::move(js));
  }
  return root.dump(2) + "\n";
}

std::vector<Diagnostic> validate_corpus(const Corpus& corpus) {
  std::vector<Diagnostic> out;
  auto warn = [&](const std::string& id, std::string msg) {
    out.push_back({Diagnostic::Severity::kWarning, id, std::move(msg)});
  };
  auto error = [&](const std::string& id, std::string msg) {
    out.push_back({Diagnostic::Severity::kError, id, std::move(msg)});
  };

  std::unordered_set<std::string> ids;
  int labeled[2] = {0, 0};
  for (const Song& song : corpus.songs) {
    if (song.id.empty()) error(song.id, "song id must be non-empty");
    if (!ids.insert(song.id).second) {
      error(song.id, "duplicate song id \"" + song.id + "\"");
    }
    if (song.segments.empty()) {
      error(song.id, "song has no segments");
      continue;
    }
    if (auto cls = class_of(song.author)) {
      ++labeled[*cls];
    } else {
      warn(song.id, "author is " + to_string(song.author) +
                        "; song is prediction-only and excluded from fitting");
    }
    for (size_t s = 0; s < song.segments.size(); ++s) {
      const Segment& seg = song.segments[s];
      std::string where = "segment " + std::to_string(s);
      if (seg.chords.empty() && seg.phrases.empty()) {
        error(song.id, where + " has neither chords nor phrases");
      }
      if (seg.chords.size() == 1) {
        warn(song.id, where + " has a single chord, so it yields no chord transitions");
      }
      for (size_t p = 0; p < seg.phrases.size(); ++p) {
        const Phrase& ph = seg.phrases[p];
        if (ph.notes.empty()) {
          error(song.id, where + " phrase " + std::to_string(p) + " is empty");
        } else if (ph.notes.size() < 2) {
          warn(song.id, where + " phrase " + std::to_string(p) +
                            " has a single note and yields only start/end transitions");
        }
        for (const Note& n : ph.notes) {
          if (n.octave < 0 || n.octave > 9) {
            error(song.id, where + " phrase " + std::to_string(p) +
                               " note octave out of range 0..9");
          }
        }
      }
    }
  }
  if (labeled[0] + labeled[1] > 0 && (labeled[0] == 0 || labeled[1] == 0)) {
    error("", "fitting requires both classes; all labeled songs are " +
                  std::string(labeled[0] > 0 ? "LENNON" : "MCCARTNEY"));
  }
  return out;
}

}  // namespace songprint
