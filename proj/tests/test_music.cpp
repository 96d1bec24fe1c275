#include "songprint/music.hpp"

#include "doctest.h"

using namespace songprint;

namespace {
Key key_of(const char* tonic, Mode mode = Mode::kMajor) {
  return Key{*PitchClass::parse(tonic), mode};
}
}  // namespace

TEST_CASE("pitch parsing collapses enharmonic spellings") {
  CHECK(PitchClass::parse("C#")->index() == PitchClass::parse("Db")->index());
  CHECK(PitchClass::parse("B#")->index() == 0);
  CHECK(PitchClass::parse("Cb")->index() == 11);
  CHECK(PitchClass::parse("G")->index() == 7);
  CHECK_FALSE(PitchClass::parse("H"));
  CHECK_FALSE(PitchClass::parse("c"));
  CHECK_FALSE(PitchClass::parse("C##"));
  for (int i = 0; i < 12; ++i) {
    auto round = PitchClass::parse(PitchClass(i).name());
    REQUIRE(round);
    CHECK(round->index() == i);
  }
}

TEST_CASE("note tokens and the octave identity") {
  auto n = parse_note_token("F#3");
  REQUIRE(n);
  CHECK(n->pitch.index() == 6);
  CHECK(n->octave == 3);
  CHECK_FALSE(parse_note_token("Bb"));
  CHECK_FALSE(parse_note_token("C10"));
  CHECK_FALSE(parse_note_token("H4"));

  // Z[i+12, j] = Z[i, j+1]: up 12 semitones = same pitch class, next octave.
  Note c4{PitchClass(0), 4};
  Note c5{PitchClass(0), 5};
  CHECK(c4.semitone() + 12 == c5.semitone());
}

TEST_CASE("degree offsets") {
  CHECK(degree_offset(*PitchClass::parse("C"), key_of("C")) == 0);
  // In A major, C# is the diatonic third.
  CHECK(degree_offset(*PitchClass::parse("C#"), key_of("A")) == 4);
  // A minor resolves to its relative major, C.
  CHECK(degree_offset(*PitchClass::parse("C"), key_of("A", Mode::kMinor)) == 0);
}

TEST_CASE("diatonic membership and degrees") {
  CHECK(is_diatonic(7));
  CHECK_FALSE(is_diatonic(3));
  CHECK_FALSE(is_diatonic(10));
  CHECK(diatonic_degree(0) == 1);
  CHECK(diatonic_degree(7) == 5);
  CHECK_FALSE(diatonic_degree(1));

  int diatonic_count = 0;
  for (int off = 0; off < 12; ++off) diatonic_count += is_diatonic(off);
  CHECK(diatonic_count == 7);

  // degree table is a bijection {0,2,4,5,7,9,11} <-> {1..7}
  bool seen[8] = {};
  for (int off = 0; off < 12; ++off) {
    if (auto d = diatonic_degree(off)) {
      CHECK_FALSE(seen[*d]);
      seen[*d] = true;
    }
  }
  for (int d = 1; d <= 7; ++d) CHECK(seen[d]);
}

TEST_CASE("intervals") {
  Note c4{PitchClass(0), 4}, c5{PitchClass(0), 5}, e5{PitchClass(4), 5};
  CHECK(interval_semitones(c4, c5) == 12);
  CHECK(interval_semitones(c4, c4) == 0);
  CHECK(interval_semitones(e5, c4) == -16);
}

TEST_CASE("chord spellings") {
  auto spell = [](const char* token) {
    auto chord = parse_chord_token(token);
    REQUIRE(chord);
    auto s = chord_spelling(*chord);
    return s[0].name() + "-" + s[1].name() + "-" + s[2].name();
  };
  CHECK(spell("C") == "C-E-G");
  CHECK(spell("Am") == "A-C-E");
  CHECK(spell("Caug") == "C-E-G#");
  CHECK(spell("Bdim") == "B-D-F");
}

TEST_CASE("chord token grammar strips extensions and rejects sus") {
  CHECK(*parse_chord_token("G7") == Chord{PitchClass(7), ChordQuality::kMajor});
  CHECK(*parse_chord_token("Cmaj7") == Chord{PitchClass(0), ChordQuality::kMajor});
  CHECK(*parse_chord_token("Am7") == Chord{PitchClass(9), ChordQuality::kMinor});
  CHECK(*parse_chord_token("Eb9") == Chord{PitchClass(3), ChordQuality::kMajor});
  CHECK(*parse_chord_token("F#m6") == Chord{PitchClass(6), ChordQuality::kMinor});
  CHECK(*parse_chord_token("Bdim7") == Chord{PitchClass(11), ChordQuality::kDiminished});
  CHECK(*parse_chord_token("Caug") == Chord{PitchClass(0), ChordQuality::kAugmented});
  CHECK(*parse_chord_token("D11") == Chord{PitchClass(2), ChordQuality::kMajor});
  CHECK(*parse_chord_token("G13") == Chord{PitchClass(7), ChordQuality::kMajor});
  CHECK_FALSE(parse_chord_token("Csus4"));
  CHECK_FALSE(parse_chord_token("C5"));
  CHECK_FALSE(parse_chord_token("Csus"));
  CHECK_FALSE(parse_chord_token("X"));
}

TEST_CASE("degree_offset is transposition invariant") {
  for (int base = 0; base < 12; ++base) {
    for (int shift = 0; shift < 12; ++shift) {
      for (int pitch = 0; pitch < 12; ++pitch) {
        Key k{PitchClass(base), Mode::kMajor};
        Key ks{PitchClass(base + shift), Mode::kMajor};
        CHECK(degree_offset(PitchClass(pitch), k) ==
              degree_offset(PitchClass(pitch + shift), ks));
      }
    }
  }
}

TEST_CASE("minor keys behave exactly like their relative major") {
  for (int tonic = 0; tonic < 12; ++tonic) {
    Key minor{PitchClass(tonic), Mode::kMinor};
    Key relative{PitchClass(tonic + 3), Mode::kMajor};
    for (int pitch = 0; pitch < 12; ++pitch) {
      CHECK(degree_offset(PitchClass(pitch), minor) ==
            degree_offset(PitchClass(pitch), relative));
    }
  }
}
