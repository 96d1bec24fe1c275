#include "songprint/features.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace songprint {

namespace {

constexpr const char* kNumeral[8] = {"", "I", "ii", "iii", "IV", "V", "vi", "vii"};

// The pentatonic (blues) pitch set: tonic, b3, 4, 5, b7.
constexpr int kPentatonic[5] = {0, 3, 5, 7, 10};
constexpr bool kPentSpecial[5] = {false, true, false, false, true};  // b3, b7

int pentatonic_pos(int offset) {
  for (int i = 0; i < 5; ++i) {
    if (kPentatonic[i] == offset) return i;
  }
  return -1;
}

int floordiv(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Position of a diatonic note on the key-relative scale ladder; consecutive
// scale degrees differ by exactly 1 across octaves.
int ladder(int semitone, int tonic_index, int degree) {
  int r = semitone - tonic_index;
  return 7 * floordiv(r, 12) + degree - 1;
}

struct Catalog {
  std::vector<FeatureId> features;
  std::unordered_map<std::string, int> index;

  // chord family
  int chord_base = 0;  // degree categories at chord_base + (degree-1)
  int chord_nondia_maj = 0, chord_nondia_min = 0;
  // note family
  int note_base = 0;  // + offset
  // chord transitions
  int ct_ifv[8][8];        // ordered pairs among degrees {1,4,5}
  int ct_pair[8][8];       // unordered diatonic pairs, [min][max]
  int ct_i_nondia = 0, ct_v_nondia = 0;
  int ct_nondia_to_dia = 0, ct_dia_to_nondia = 0, ct_nondia_nondia = 0;
  // note transitions
  int nt_start[7], nt_start_nondia = 0;
  int nt_end[7], nt_end_nondia = 0;
  int nt_tonic[8][8];      // ordered pairs involving degree 1
  int nt_pent[5][5];       // ordered pentatonic pairs with at least one b3/b7
  int nt_repeat[8];        // degrees 2..7
  int nt_four_five = 0, nt_five_four = 0;
  int nt_up[5], nt_down[5];
  int nt_up_half_dia = 0, nt_down_half_dia = 0;
  int nt_up_half_nondia = 0, nt_down_half_nondia = 0;
  int nt_repeat_nondia = 0, nt_up_rest = 0, nt_down_rest = 0;
  // contours
  int contour_base = 0;  // + 9*a + 3*b + c over directions U=0, D=1, S=2

  Catalog();

  int add(Family family, std::string code, std::string description) {
    int id = static_cast<int>(features.size());
    index.emplace(code, id);
    features.push_back({family, std::move(code), std::move(description)});
    return id;
  }
};

Catalog::Catalog() {
  for (auto& row : ct_ifv) std::fill(std::begin(row), std::end(row), -1);
  for (auto& row : ct_pair) std::fill(std::begin(row), std::end(row), -1);
  for (auto& row : nt_tonic) std::fill(std::begin(row), std::end(row), -1);
  for (auto& row : nt_pent) std::fill(std::begin(row), std::end(row), -1);
  std::fill(std::begin(nt_repeat), std::end(nt_repeat), -1);

  // Chords: the seven diatonic categories (minor vii replaces the diminished
  // seventh chord), then the two non-diatonic pools.
  chord_base = static_cast<int>(features.size());
  static constexpr const char* kChordDesc[7] = {
      "diatonic chord I (major)",   "diatonic chord ii (minor)",
      "diatonic chord iii (minor)", "diatonic chord IV (major)",
      "diatonic chord V (major)",   "diatonic chord vi (minor)",
      "diatonic chord vii (minor)"};
  for (int d = 1; d <= 7; ++d) {
    add(Family::kChord, std::string("CHORD:") + kNumeral[d], kChordDesc[d - 1]);
  }
  chord_nondia_maj = add(Family::kChord, "CHORD:NONDIATONIC_MAJ",
                         "non-diatonic major chord or any augmented chord");
  chord_nondia_min = add(Family::kChord, "CHORD:NONDIATONIC_MIN",
                         "non-diatonic minor chord or any diminished chord");

  // Notes: tonic-relative pitch classes, octave ignored.
  note_base = static_cast<int>(features.size());
  for (int off = 0; off < 12; ++off) {
    std::string nm = off == 0 ? "tonic" : offset_name(off);
    add(Family::kNote, "NOTE:" + nm, "melodic note on " + (off == 0 ? "the tonic" : offset_name(off)));
  }

  // Chord transitions.
  static constexpr int kIFV[3] = {1, 4, 5};
  for (int a : kIFV) {
    for (int b : kIFV) {
      if (a == b) continue;
      ct_ifv[a][b] = add(Family::kChordTransition,
                         std::string("CT:") + kNumeral[a] + "_TO_" + kNumeral[b],
                         std::string("chord change ") + kNumeral[a] + " to " + kNumeral[b]);
    }
  }
  for (int a = 1; a <= 7; ++a) {
    for (int b = a + 1; b <= 7; ++b) {
      bool a_ifv = (a == 1 || a == 4 || a == 5);
      bool b_ifv = (b == 1 || b == 4 || b == 5);
      if (a_ifv && b_ifv) continue;
      int id = add(Family::kChordTransition,
                   std::string("CT:BETWEEN_") + kNumeral[a] + "_AND_" + kNumeral[b],
                   std::string("chord change between ") + kNumeral[a] + " and " +
                       kNumeral[b] + " (either order)");
      ct_pair[a][b] = ct_pair[b][a] = id;
    }
  }
  ct_i_nondia = add(Family::kChordTransition, "CT:I_NONDIA",
                    "chord change between the tonic and a non-diatonic chord (either direction)");
  ct_v_nondia = add(Family::kChordTransition, "CT:V_NONDIA",
                    "chord change between the dominant and a non-diatonic chord (either direction)");
  ct_nondia_to_dia = add(Family::kChordTransition, "CT:NONDIA_TO_DIA",
                         "chord change from a non-diatonic chord to a diatonic chord other than I or V");
  ct_dia_to_nondia = add(Family::kChordTransition, "CT:DIA_TO_NONDIA",
                         "chord change from a diatonic chord other than I or V to a non-diatonic chord");
  ct_nondia_nondia = add(Family::kChordTransition, "CT:NONDIA_TO_NONDIA",
                         "chord change between two non-diatonic chords");

  // Note transitions; rule order is the matching precedence.
  for (int d = 1; d <= 7; ++d) {
    nt_start[d - 1] = add(Family::kNoteTransition, "NT:START_" + std::to_string(d),
                          "phrase start on degree " + std::to_string(d));
  }
  nt_start_nondia = add(Family::kNoteTransition, "NT:START_NONDIA",
                        "phrase start on a non-diatonic note");
  for (int d = 1; d <= 7; ++d) {
    nt_end[d - 1] = add(Family::kNoteTransition, "NT:END_" + std::to_string(d),
                        "phrase end on degree " + std::to_string(d));
  }
  nt_end_nondia = add(Family::kNoteTransition, "NT:END_NONDIA",
                      "phrase end on a non-diatonic note");

  nt_tonic[1][1] = add(Family::kNoteTransition, "NT:1_TO_1",
                       "repeated tonic (any octave)");
  for (int d = 2; d <= 7; ++d) {
    nt_tonic[1][d] = add(Family::kNoteTransition,
                         "NT:1_TO_" + std::to_string(d),
                         "diatonic transition from the tonic to degree " +
                             std::to_string(d) + " (any octave)");
    nt_tonic[d][1] = add(Family::kNoteTransition,
                         "NT:" + std::to_string(d) + "_TO_1",
                         "diatonic transition from degree " + std::to_string(d) +
                             " to the tonic (any octave)");
  }

  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) {
      if (!kPentSpecial[a] && !kPentSpecial[b]) continue;
      int oa = kPentatonic[a], ob = kPentatonic[b];
      if (oa == ob) {
        nt_pent[a][b] = add(Family::kNoteTransition, "NT:REPEAT_" + offset_name(oa),
                            "repeated " + offset_name(oa) + " (any octave)");
        continue;
      }
      bool up = ((ob - oa + 12) % 12) <= 6;
      std::string dir = up ? "UP" : "DOWN";
      nt_pent[a][b] =
          add(Family::kNoteTransition,
              "NT:" + dir + "_" + offset_name(oa) + "_TO_" + offset_name(ob),
              "pentatonic-scale transition " + std::string(up ? "up" : "down") +
                  " from " + offset_name(oa) + " to " + offset_name(ob) +
                  " (any octave)");
    }
  }

  for (int d = 2; d <= 7; ++d) {
    nt_repeat[d] = add(Family::kNoteTransition, "NT:REPEAT_" + std::to_string(d),
                       "repeated degree " + std::to_string(d) + " (any octave)");
  }
  nt_four_five = add(Family::kNoteTransition, "NT:4_TO_5",
                     "diatonic transition from degree 4 to degree 5");
  nt_five_four = add(Family::kNoteTransition, "NT:5_TO_4",
                     "diatonic transition from degree 5 to degree 4");
  for (int k = 1; k <= 5; ++k) {
    nt_up[k - 1] = add(Family::kNoteTransition,
                       "NT:UP" + std::to_string(k) + "_DIATONIC",
                       "up " + std::to_string(k) + " step(s) on the diatonic scale"
                       " (tonic pairs and 4/5 excluded)");
  }
  for (int k = 1; k <= 5; ++k) {
    nt_down[k - 1] = add(Family::kNoteTransition,
                         "NT:DOWN" + std::to_string(k) + "_DIATONIC",
                         "down " + std::to_string(k) + " step(s) on the diatonic scale"
                         " (tonic pairs and 4/5 excluded)");
  }
  nt_up_half_dia = add(Family::kNoteTransition, "NT:UP_HALFSTEP_DIA_TO_NONDIA",
                       "half step up from a diatonic to a non-diatonic note");
  nt_down_half_dia = add(Family::kNoteTransition, "NT:DOWN_HALFSTEP_DIA_TO_NONDIA",
                         "half step down from a diatonic to a non-diatonic note");
  nt_up_half_nondia = add(Family::kNoteTransition, "NT:UP_HALFSTEP_NONDIA_TO_DIA",
                          "half step up from a non-diatonic to a diatonic note");
  nt_down_half_nondia = add(Family::kNoteTransition, "NT:DOWN_HALFSTEP_NONDIA_TO_DIA",
                            "half step down from a non-diatonic to a diatonic note");
  nt_repeat_nondia = add(Family::kNoteTransition, "NT:REPEAT_NONDIA",
                         "repeated non-diatonic pitch class other than b3 or b7");
  nt_up_rest = add(Family::kNoteTransition, "NT:UP_NONDIA",
                   "any remaining upward movement (involves a non-diatonic note"
                   " or a diatonic leap beyond 5 steps)");
  nt_down_rest = add(Family::kNoteTransition, "NT:DOWN_NONDIA",
                     "any remaining downward movement (involves a non-diatonic note"
                     " or a diatonic leap beyond 5 steps)");

  // Contours.
  contour_base = static_cast<int>(features.size());
  static constexpr char kDirChar[3] = {'U', 'D', 'S'};
  static constexpr const char* kDirWord[3] = {"up", "down", "same"};
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      for (int c = 0; c < 3; ++c) {
        std::string code = "CONTOUR:";
        code += kDirChar[a];
        code += kDirChar[b];
        code += kDirChar[c];
        add(Family::kContour, code,
            std::string("4-note contour ") + kDirWord[a] + "-" + kDirWord[b] +
                "-" + kDirWord[c]);
      }
    }
  }
}

const Catalog& the_catalog() {
  static const Catalog c;
  return c;
}

}  // namespace

std::string to_string(Family family) {
  switch (family) {
    case Family::kChord: return "CHORD";
    case Family::kNote: return "NOTE";
    case Family::kChordTransition: return "CHORD_TRANSITION";
    case Family::kNoteTransition: return "NOTE_TRANSITION";
    case Family::kContour: return "CONTOUR";
  }
  return "?";
}

const std::vector<FeatureId>& catalog() { return the_catalog().features; }

int catalog_index(std::string_view code) {
  const auto& idx = the_catalog().index;
  auto it = idx.find(std::string(code));
  return it == idx.end() ? -1 : it->second;
}

const FeatureId& feature_at(int index) { return the_catalog().features.at(index); }

std::string catalog_csv() {
  std::string out = "family,code,description\n";
  for (const FeatureId& f : catalog()) {
    out += to_string(f.family);
    out += ',';
    out += f.code;
    out += ',';
    out += f.description;
    out += '\n';
  }
  return out;
}

int classify_chord(const Chord& chord, const Key& key) {
  const Catalog& cat = the_catalog();
  int off = degree_offset(chord.root, key);
  auto degree = diatonic_degree(off);
  if (degree && (chord.quality == ChordQuality::kMajor ||
                 chord.quality == ChordQuality::kMinor)) {
    bool expect_major = (*degree == 1 || *degree == 4 || *degree == 5);
    bool is_major = chord.quality == ChordQuality::kMajor;
    if (expect_major == is_major) return cat.chord_base + *degree - 1;
  }
  bool major_type = chord.quality == ChordQuality::kMajor ||
                    chord.quality == ChordQuality::kAugmented;
  return major_type ? cat.chord_nondia_maj : cat.chord_nondia_min;
}

int classify_note(const Note& note, const Key& key) {
  return the_catalog().note_base + degree_offset(note.pitch, key);
}

std::optional<int> classify_chord_transition(const Chord& from, const Chord& to,
                                             const Key& key) {
  if (from == to) return std::nullopt;
  const Catalog& cat = the_catalog();
  int c1 = classify_chord(from, key) - cat.chord_base;
  int c2 = classify_chord(to, key) - cat.chord_base;
  bool nd1 = c1 >= 7, nd2 = c2 >= 7;
  if (!nd1 && !nd2) {
    int g1 = c1 + 1, g2 = c2 + 1;
    if (g1 == g2) return std::nullopt;  // same diatonic chord, unreachable
    if (cat.ct_ifv[g1][g2] >= 0) return cat.ct_ifv[g1][g2];
    return cat.ct_pair[g1][g2];
  }
  if ((!nd1 && c1 == 0) || (!nd2 && c2 == 0)) return cat.ct_i_nondia;
  if ((!nd1 && c1 == 4) || (!nd2 && c2 == 4)) return cat.ct_v_nondia;
  if (nd1 && !nd2) return cat.ct_nondia_to_dia;
  if (!nd1 && nd2) return cat.ct_dia_to_nondia;
  return cat.ct_nondia_nondia;
}

int classify_note_transition(const std::optional<Note>& prev,
                             const std::optional<Note>& next, const Key& key) {
  const Catalog& cat = the_catalog();
  if (!prev && !next) {
    throw std::logic_error("note transition needs at least one note");
  }
  if (!prev) {
    auto d = diatonic_degree(degree_offset(next->pitch, key));
    return d ? cat.nt_start[*d - 1] : cat.nt_start_nondia;
  }
  if (!next) {
    auto d = diatonic_degree(degree_offset(prev->pitch, key));
    return d ? cat.nt_end[*d - 1] : cat.nt_end_nondia;
  }

  int o1 = degree_offset(prev->pitch, key);
  int o2 = degree_offset(next->pitch, key);
  auto d1 = diatonic_degree(o1);
  auto d2 = diatonic_degree(o2);
  int ds = next->semitone() - prev->semitone();

  // Diatonic pairs touching the tonic, ordered by direction of travel on the
  // scale name, octave ignored.
  if (d1 && d2 && (*d1 == 1 || *d2 == 1)) return cat.nt_tonic[*d1][*d2];

  // Pentatonic-scale pairs involving b3 or b7, octave ignored.
  int p1 = pentatonic_pos(o1), p2 = pentatonic_pos(o2);
  if (p1 >= 0 && p2 >= 0 && cat.nt_pent[p1][p2] >= 0) return cat.nt_pent[p1][p2];

  if (d1 && d2) {
    if (o1 == o2) return cat.nt_repeat[*d1];
    if (*d1 == 4 && *d2 == 5) return cat.nt_four_five;
    if (*d1 == 5 && *d2 == 4) return cat.nt_five_four;
    int tonic = key.effective_tonic().index();
    int k = ladder(next->semitone(), tonic, *d2) -
            ladder(prev->semitone(), tonic, *d1);
    if (k >= 1 && k <= 5) return cat.nt_up[k - 1];
    if (k <= -1 && k >= -5) return cat.nt_down[-k - 1];
    // diatonic leaps beyond 5 steps fall through to the catch-alls
  } else {
    // Half-step moves always have exactly one diatonic endpoint.
    if (ds == 1) return d1 ? cat.nt_up_half_dia : cat.nt_up_half_nondia;
    if (ds == -1) return d1 ? cat.nt_down_half_dia : cat.nt_down_half_nondia;
    if (o1 == o2) return cat.nt_repeat_nondia;
  }
  return ds > 0 ? cat.nt_up_rest : cat.nt_down_rest;
}

int classify_contour(const Note& a, const Note& b, const Note& c, const Note& d) {
  auto dir = [](const Note& x, const Note& y) {
    int ds = y.semitone() - x.semitone();
    return ds > 0 ? 0 : (ds < 0 ? 1 : 2);  // U, D, S
  };
  return the_catalog().contour_base + 9 * dir(a, b) + 3 * dir(b, c) + dir(c, d);
}

bool FeatureVector::contains(int feature) const {
  return std::binary_search(present.begin(), present.end(), feature);
}

FeatureVector extract_features(const Song& song) {
  std::set<int> feats;
  for (const Segment& seg : song.segments) {
    const Key& key = seg.key;

    std::vector<Chord> collapsed;
    for (const Chord& c : seg.chords) {
      if (collapsed.empty() || !(collapsed.back() == c)) collapsed.push_back(c);
    }
    for (const Chord& c : collapsed) feats.insert(classify_chord(c, key));
    for (size_t i = 1; i < collapsed.size(); ++i) {
      if (auto t = classify_chord_transition(collapsed[i - 1], collapsed[i], key)) {
        feats.insert(*t);
      }
    }

    for (const Phrase& phrase : seg.phrases) {
      const auto& notes = phrase.notes;
      for (const Note& n : notes) feats.insert(classify_note(n, key));
      std::optional<Note> prev;
      for (const Note& n : notes) {
        feats.insert(classify_note_transition(prev, n, key));
        prev = n;
      }
      feats.insert(classify_note_transition(prev, std::nullopt, key));
      for (size_t i = 0; i + 3 < notes.size(); ++i) {
        feats.insert(classify_contour(notes[i], notes[i + 1], notes[i + 2],
                                      notes[i + 3]));
      }
    }
  }
  return FeatureVector{song.id, {feats.begin(), feats.end()}};
}

std::vector<std::size_t> FeatureMatrix::labeled_rows() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < rows(); ++i) {
    if (labels[i]) out.push_back(i);
  }
  return out;
}

int FeatureMatrix::column_count(std::size_t col,
                                const std::vector<std::size_t>& row_set) const {
  int s = 0;
  for (std::size_t r : row_set) s += at(r, col);
  return s;
}

FeatureMatrix FeatureMatrix::select(const std::vector<std::size_t>& row_subset,
                                    const std::vector<std::size_t>& col_subset) const {
  FeatureMatrix out;
  out.song_ids.reserve(row_subset.size());
  out.features.reserve(col_subset.size());
  for (std::size_t c : col_subset) out.features.push_back(features[c]);
  out.cells.reserve(row_subset.size() * col_subset.size());
  for (std::size_t r : row_subset) {
    out.song_ids.push_back(song_ids[r]);
    out.labels.push_back(labels[r]);
    for (std::size_t c : col_subset) out.cells.push_back(at(r, c));
  }
  return out;
}

FeatureMatrix FeatureMatrix::without_row(std::size_t row) const {
  std::vector<std::size_t> rows_keep;
  for (std::size_t r = 0; r < rows(); ++r) {
    if (r != row) rows_keep.push_back(r);
  }
  std::vector<std::size_t> cols_keep(cols());
  for (std::size_t c = 0; c < cols(); ++c) cols_keep[c] = c;
  return select(rows_keep, cols_keep);
}

FeatureMatrix FeatureMatrix::without_feature(int feature) const {
  std::vector<std::size_t> rows_keep(rows());
  for (std::size_t r = 0; r < rows(); ++r) rows_keep[r] = r;
  std::vector<std::size_t> cols_keep;
  for (std::size_t c = 0; c < cols(); ++c) {
    if (features[c] != feature) cols_keep.push_back(c);
  }
  return select(rows_keep, cols_keep);
}

FeatureMatrix build_matrix(const Corpus& corpus) {
  if (corpus.songs.empty()) {
    throw std::invalid_argument("cannot build a feature matrix from an empty corpus");
  }
  FeatureMatrix m;
  const std::size_t total = catalog().size();
  m.features.resize(total);
  for (std::size_t j = 0; j < total; ++j) m.features[j] = static_cast<int>(j);
  for (const Song& song : corpus.songs) {
    m.song_ids.push_back(song.id);
    m.labels.push_back(class_of(song.author));
    FeatureVector fv = extract_features(song);
    std::vector<std::uint8_t> row(total, 0);
    for (int f : fv.present) row[f] = 1;
    m.cells.insert(m.cells.end(), row.begin(), row.end());
  }
  return m;
}

PrevalenceResult prevalence_filter(const FeatureMatrix& m, int min_count,
                                   int max_count) {
  auto labeled = m.labeled_rows();
  PrevalenceResult result;
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    int s = m.column_count(c, labeled);
    if (s <= min_count || s >= max_count) {
      result.dropped.push_back({m.features[c], s});
    } else {
      keep.push_back(c);
    }
  }
  if (keep.empty()) {
    throw std::runtime_error("prevalence filter dropped every feature column");
  }
  std::vector<std::size_t> all_rows(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) all_rows[r] = r;
  result.matrix = m.select(all_rows, keep);
  return result;
}

}  // namespace songprint
