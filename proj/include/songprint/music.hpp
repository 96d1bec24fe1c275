#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace songprint {

// Pitch class = semitone index above C within one octave (0..11).
// Enharmonic spellings (C# / Db) collapse to the same index at parse time;
// everything downstream works on integer offsets only.
class PitchClass {
 public:
  constexpr PitchClass() = default;
  constexpr explicit PitchClass(int index) : index_(((index % 12) + 12) % 12) {}

  constexpr int index() const { return index_; }

  // Accepts "A".."G" with optional "#" or "b". Returns nullopt on anything else.
  static std::optional<PitchClass> parse(std::string_view token);

  // Sharp-preferred spelling ("C", "C#", "D", ...).
  std::string name() const;

  friend constexpr bool operator==(PitchClass, PitchClass) = default;

 private:
  int index_ = 0;
};

// Scientific pitch notation. Supported octave range 0..9.
struct Note {
  PitchClass pitch;
  int octave = 4;

  // Absolute semitone value; total order over notes, and adding 12 is
  // exactly "same pitch class, one octave up".
  constexpr int semitone() const { return 12 * octave + pitch.index(); }

  friend constexpr bool operator==(const Note&, const Note&) = default;
};

enum class Mode { kMajor, kMinor };

struct Key {
  PitchClass tonic;
  Mode mode = Mode::kMajor;

  // Minor keys resolve to the relative major (up a minor third); all degree
  // arithmetic is done against this effective tonic.
  constexpr PitchClass effective_tonic() const {
    return mode == Mode::kMinor ? PitchClass(tonic.index() + 3) : tonic;
  }

  friend constexpr bool operator==(const Key&, const Key&) = default;
};

enum class ChordQuality { kMajor, kMinor, kDiminished, kAugmented };

// Triad only; sevenths and extensions are stripped at parse time.
struct Chord {
  PitchClass root;
  ChordQuality quality = ChordQuality::kMajor;

  friend constexpr bool operator==(const Chord&, const Chord&) = default;
};

// Semitone offset of a pitch above the key's effective tonic, in 0..11.
int degree_offset(PitchClass pitch, const Key& key);

// Major-scale membership of an offset: {0,2,4,5,7,9,11}.
bool is_diatonic(int offset);

// Maps diatonic offsets {0,2,4,5,7,9,11} -> degree 1..7; nullopt otherwise.
std::optional<int> diatonic_degree(int offset);

// Signed semitone distance from a to b.
int interval_semitones(const Note& a, const Note& b);

// Root plus the quality's interval template, reduced mod 12.
std::array<PitchClass, 3> chord_spelling(const Chord& chord);

// Offset spelled relative to the tonic: "1", "b2", "2", "b3", ... "7".
std::string offset_name(int offset);

// Token parsing for the corpus format. These return nullopt on malformed
// input; the corpus parser attaches location context.

// "F#3", "Bb5", ... (octave 0..9).
std::optional<Note> parse_note_token(std::string_view token);

// Pitch + optional quality ("m", "dim", "aug") + optional extension
// ("6","7","9","11","13","maj7") which is discarded. "sus" and power-chord
// suffixes are rejected rather than guessed at.
std::optional<Chord> parse_chord_token(std::string_view token);

std::string note_token(const Note& note);
std::string chord_token(const Chord& chord);

}  // namespace songprint
