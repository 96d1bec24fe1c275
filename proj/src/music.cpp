#include "songprint/music.hpp"

#include <cctype>

namespace songprint {

namespace {

constexpr int kLetterSemitone[7] = {9, 11, 0, 2, 4, 5, 7};  // A..G

constexpr const char* kSharpNames[12] = {"C",  "C#", "D",  "D#", "E",  "F",
                                         "F#", "G",  "G#", "A",  "A#", "B"};

// Degree table for offsets 0..11: 0 marks non-diatonic.
constexpr int kDegreeOf[12] = {1, 0, 2, 0, 3, 4, 0, 5, 0, 6, 0, 7};

// Consumes a leading pitch token, returns its length (1 or 2) or 0.
int take_pitch(std::string_view s, int* index) {
  if (s.empty() || s[0] < 'A' || s[0] > 'G') return 0;
  int idx = kLetterSemitone[s[0] - 'A'];
  int used = 1;
  if (s.size() > 1 && (s[1] == '#' || s[1] == 'b')) {
    idx += (s[1] == '#') ? 1 : -1;
    used = 2;
  }
  *index = ((idx % 12) + 12) % 12;
  return used;
}

}  // namespace

std::optional<PitchClass> PitchClass::parse(std::string_view token) {
  int idx = 0;
  int used = take_pitch(token, &idx);
  if (used == 0 || static_cast<size_t>(used) != token.size()) return std::nullopt;
  return PitchClass(idx);
}

std::string PitchClass::name() const { return kSharpNames[index_]; }

int degree_offset(PitchClass pitch, const Key& key) {
  int off = pitch.index() - key.effective_tonic().index();
  return ((off % 12) + 12) % 12;
}

bool is_diatonic(int offset) { return kDegreeOf[offset] != 0; }

std::optional<int> diatonic_degree(int offset) {
  int d = kDegreeOf[offset];
  if (d == 0) return std::nullopt;
  return d;
}

int interval_semitones(const Note& a, const Note& b) {
  return b.semitone() - a.semitone();
}

std::array<PitchClass, 3> chord_spelling(const Chord& chord) {
  int third = 4, fifth = 7;
  switch (chord.quality) {
    case ChordQuality::kMajor: break;
    case ChordQuality::kMinor: third = 3; break;
    case ChordQuality::kDiminished: third = 3; fifth = 6; break;
    case ChordQuality::kAugmented: fifth = 8; break;
  }
  int r = chord.root.index();
  return {PitchClass(r), PitchClass(r + third), PitchClass(r + fifth)};
}

std::string offset_name(int offset) {
  static constexpr const char* kNames[12] = {"1",  "b2", "2", "b3", "3",  "4",
                                             "b5", "5",  "b6", "6", "b7", "7"};
  return kNames[((offset % 12) + 12) % 12];
}

std::optional<Note> parse_note_token(std::string_view token) {
  int idx = 0;
  int used = take_pitch(token, &idx);
  if (used == 0) return std::nullopt;
  std::string_view rest = token.substr(used);
  if (rest.empty() || rest.size() > 2) return std::nullopt;
  int octave = 0;
  for (char c : rest) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    octave = octave * 10 + (c - '0');
  }
  if (octave > 9) return std::nullopt;
  return Note{PitchClass(idx), octave};
}

std::optional<Chord> parse_chord_token(std::string_view token) {
  int idx = 0;
  int used = take_pitch(token, &idx);
  if (used == 0) return std::nullopt;
  std::string_view rest = token.substr(used);

  ChordQuality quality = ChordQuality::kMajor;
  if (rest.rfind("maj7", 0) == 0) {
    rest.remove_prefix(4);
  } else if (rest.rfind("dim", 0) == 0) {
    quality = ChordQuality::kDiminished;
    rest.remove_prefix(3);
  } else if (rest.rfind("aug", 0) == 0) {
    quality = ChordQuality::kAugmented;
    rest.remove_prefix(3);
  } else if (!rest.empty() && rest[0] == 'm') {
    quality = ChordQuality::kMinor;
    rest.remove_prefix(1);
  }
  if (!rest.empty()) {
    if (rest != "6" && rest != "7" && rest != "9" && rest != "11" &&
        rest != "13" && rest != "maj7") {
      return std::nullopt;
    }
  }
  return Chord{PitchClass(idx), quality};
}

std::string note_token(const Note& note) {
  return note.pitch.name() + std::to_string(note.octave);
}

std::string chord_token(const Chord& chord) {
  std::string s = chord.root.name();
  switch (chord.quality) {
    case ChordQuality::kMajor: break;
    case ChordQuality::kMinor: s += "m"; break;
    case ChordQuality::kDiminished: s += "dim"; break;
    case ChordQuality::kAugmented: s += "aug"; break;
  }
  return s;
}

}  // namespace songprint
