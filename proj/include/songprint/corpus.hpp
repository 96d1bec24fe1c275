#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "songprint/music.hpp"

namespace songprint {

// LENNON encodes class 0 and MCCARTNEY class 1; DISPUTED and COLLABORATIVE
// songs carry no label and are prediction-only.
enum class AuthorLabel { kLennon, kMcCartney, kDisputed, kCollaborative };

std::string to_string(AuthorLabel label);
std::optional<AuthorLabel> author_from_string(std::string_view s);

// 0/1 class for songs usable in fitting, nullopt otherwise.
std::optional<int> class_of(AuthorLabel label);

// A rest-delimited melodic run; never empty.
struct Phrase {
  std::vector<Note> notes;
  friend bool operator==(const Phrase&, const Phrase&) = default;
};

// One key region of a song. Modulations are modeled as segment boundaries;
// chord transitions never cross them.
struct Segment {
  Key key;
  std::vector<Chord> chords;
  std::vector<Phrase> phrases;
  friend bool operator==(const Segment&, const Segment&) = default;
};

// A song or separately analyzed song portion (a bridge analyzed on its own
// is simply another Song record).
struct Song {
  std::string id;
  std::string title;
  AuthorLabel author = AuthorLabel::kDisputed;
  std::vector<Segment> segments;
  friend bool operator==(const Song&, const Song&) = default;
};

struct Corpus {
  std::vector<Song> songs;

  const Song* find(std::string_view id) const;
  friend bool operator==(const Corpus&, const Corpus&) = default;
};

// Parse failure with a human-readable location ("songs[2].segments[0]...").
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string location, const std::string& message)
      : std::runtime_error(location.empty() ? message
                                            : location + ": " + message),
        location_(std::move(location)) {}
  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

Corpus parse_corpus(std::string_view document);
std::string serialize_corpus(const Corpus& corpus);

struct Diagnostic {
  enum class Severity { kWarning, kError };
  Severity severity;
  std::string song_id;  // empty for corpus-level diagnostics
  std::string message;
};

// Non-throwing structural checks; empty result means clean. Errors make the
// corpus unusable for fitting, warnings are informational.
std::vector<Diagnostic> validate_corpus(const Corpus& corpus);

}  // namespace songprint
