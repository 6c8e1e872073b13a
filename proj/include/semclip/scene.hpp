#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semclip/errors.hpp"
#include "semclip/rng.hpp"

namespace semclip {

enum class Color { Red, Blue, Green, Yellow };
enum class Shape { Square, Triangle, Circle };
enum class Relation { LeftOf, RightOf, Above, Below };

constexpr int kNumColors = 4;
constexpr int kNumShapes = 3;
constexpr int kNumRelations = 4;

const char* to_word(Color c);
const char* to_word(Shape s);
/// Surface form: "left of", "right of", "above", "below".
std::string relation_words(Relation r);
/// Snake-case identifier: left_of, right_of, above, below.
const char* relation_name(Relation r);
Relation relation_from_name(const std::string& name);
Color color_from_word(const std::string& word);
Shape shape_from_word(const std::string& word);
Relation inverse(Relation r);

struct SceneObject {
    Color color;
    Shape shape;
    bool operator==(const SceneObject&) const = default;
};

/// Two-object spatial scene; ground truth for both images and captions.
/// Valid scenes have distinguishable objects (different color or shape).
struct Scene {
    SceneObject a;
    Relation relation;
    SceneObject b;

    bool operator==(const Scene&) const = default;
    bool valid() const { return !(a == b); }
    std::string id() const;
    /// One-hot color_a + shape_a + relation + color_b + shape_b.
    std::vector<double> feature_vector() const;
};

constexpr int kSceneFeatureDim = 2 * (kNumColors + kNumShapes) + kNumRelations;

enum class NegationStrategy { LexicalNot, RelationFlip };

const char* to_string(NegationStrategy s);
NegationStrategy negation_strategy_from_string(const std::string& s);

struct CaptionTriple {
    std::string scene_id;
    std::string original;
    std::string paraphrase;
    std::string negation;
    NegationStrategy strategy = NegationStrategy::LexicalNot;
    bool validated = false;
};

/// Closed, ordered token list covering the caption grammar and the zero-shot
/// prompt template. Indices are contiguous from 0; the last token is <eos>.
class Vocabulary {
public:
    Vocabulary();
    int index_of(const std::string& token) const;
    const std::string& token_at(int index) const;
    int size() const { return static_cast<int>(tokens_.size()); }
    int eos_index() const { return size() - 1; }
    const std::vector<std::string>& tokens() const { return tokens_; }
    uint64_t hash() const { return hash_; }

private:
    std::vector<std::string> tokens_;
    uint64_t hash_ = 0;
};

/// Uniform over valid scenes; identical rng state gives identical draws.
Scene sample_scene(Rng& rng);

/// Canonical surface form "a <color> <shape> <relation> a <color> <shape>".
std::string render_caption(const Scene& s);
/// Argument-swapped caption with the inverse relation; scene-equivalent.
std::string paraphrase_caption(const Scene& s);
/// LexicalNot inserts "not" before the relation; RelationFlip inverts the
/// relation without swapping arguments. Both are false for the scene.
std::string negate_caption(const Scene& s, NegationStrategy strategy);

/// Symbolic reading of a caption: a proposition plus an optional negation.
struct ParsedCaption {
    bool negated = false;
    Scene proposition{};
};

std::optional<ParsedCaption> parse_caption(const std::string& caption,
                                           std::string* why = nullptr);

/// Truth of the caption against the scene: the proposition holds under the
/// literal reading or the argument-swapped inverse reading; a leading
/// negation complements the result.
bool caption_true_in_scene(const ParsedCaption& c, const Scene& s);

/// Symbolic check that the paraphrase is true and the negation false for the
/// scene. Unparseable captions fail validation with a reason.
bool validate_triple(const CaptionTriple& t, const Scene& s, std::string* reason = nullptr);

/// Render, paraphrase and negate; marks the triple validated.
CaptionTriple make_triple(const Scene& s, NegationStrategy strategy);

uint64_t fnv1a(const void* data, std::size_t n, uint64_t h = 0xcbf29ce484222325ULL);

}  // namespace semclip
