#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "songprint/corpus.hpp"
#include "songprint/music.hpp"

namespace songprint {

enum class Family { kChord, kNote, kChordTransition, kNoteTransition, kContour };

std::string to_string(Family family);

// One binary musical feature. Codes are stable, unique, and enumerable per
// family; the canonical enumeration (see catalog()) fixes column order
// everywhere downstream.
struct FeatureId {
  Family family;
  std::string code;
  std::string description;

  friend bool operator==(const FeatureId& a, const FeatureId& b) {
    return a.family == b.family && a.code == b.code;
  }
};

// The canonical feature enumeration: 9 chord + 12 note + 29 chord-transition
// + 70 note-transition + 27 contour categories, in that order.
const std::vector<FeatureId>& catalog();

// Catalog index of a code, or -1.
int catalog_index(std::string_view code);

// The full enumeration as CSV (family,code,description). The copy committed
// under docs/ must match this byte for byte.
std::string catalog_csv();

// --- Per-event classifiers. All are total over valid inputs and return
// catalog indices; the *_id variants return the FeatureId.

// Chord categories: I ii iii IV V vi vii (minor vii stands in for the
// diatonic seventh chord), plus pooled non-diatonic major (incl. augmented)
// and non-diatonic minor (incl. diminished).
int classify_chord(const Chord& chord, const Key& key);

// Note categories: the 12 tonic-relative pitch classes, octave ignored.
int classify_note(const Note& note, const Key& key);

// Chord-pair categories. Expects a pair of distinct consecutive chords
// (identical chords are collapsed beforehand and yield no transition).
std::optional<int> classify_chord_transition(const Chord& from, const Chord& to,
                                             const Key& key);

// Note-pair categories over a phrase extended with boundary markers
// (nullopt = phrase start/end rest). Exactly one of prev/next may be a
// boundary. First matching rule of the canonical rule list wins; see
// docs/feature_catalog.csv for the generated table.
int classify_note_transition(const std::optional<Note>& prev,
                             const std::optional<Note>& next, const Key& key);

// Contour categories: Up/Down/Same direction triple over a 4-note window.
int classify_contour(const Note& a, const Note& b, const Note& c, const Note& d);

const FeatureId& feature_at(int index);

// Set of features present in a song (presence only, never counts): union of
// all five classifiers over all segments. Chord transitions do not cross
// segment boundaries; note transitions and contours do not cross phrases.
struct FeatureVector {
  std::string song_id;
  std::vector<int> present;  // sorted catalog indices

  bool contains(int feature) const;
};

FeatureVector extract_features(const Song& song);

struct FeatureMatrix {
  std::vector<std::string> song_ids;
  std::vector<int> features;            // catalog indices, canonical order
  std::vector<std::uint8_t> cells;      // row-major rows x features
  std::vector<std::optional<int>> labels;  // 0 = Lennon, 1 = McCartney

  std::size_t rows() const { return song_ids.size(); }
  std::size_t cols() const { return features.size(); }
  std::uint8_t at(std::size_t row, std::size_t col) const {
    return cells[row * features.size() + col];
  }

  std::vector<std::size_t> labeled_rows() const;

  // Column sum over the given rows.
  int column_count(std::size_t col, const std::vector<std::size_t>& rows) const;

  FeatureMatrix select(const std::vector<std::size_t>& row_subset,
                       const std::vector<std::size_t>& col_subset) const;
  FeatureMatrix without_row(std::size_t row) const;
  FeatureMatrix without_feature(int feature) const;
};

// Rows in corpus order, columns = the full canonical enumeration.
FeatureMatrix build_matrix(const Corpus& corpus);

struct DroppedFeature {
  int feature;
  int count;  // presence count over the labeled rows
};

struct PrevalenceResult {
  FeatureMatrix matrix;
  std::vector<DroppedFeature> dropped;
};

// Drops columns whose labeled-row sum s satisfies s <= min_count or
// s >= max_count. Throws if nothing survives.
PrevalenceResult prevalence_filter(const FeatureMatrix& m, int min_count,
                                   int max_count);

}  // namespace songprint
