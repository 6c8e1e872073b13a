#include "semclip/scene.hpp"

#include <sstream>

namespace semclip {

const char* to_word(Color c) {
    switch (c) {
        case Color::Red: return "red";
        case Color::Blue: return "blue";
        case Color::Green: return "green";
        case Color::Yellow: return "yellow";
    }
    throw ContractError("unknown color");
}

const char* to_word(Shape s) {
    switch (s) {
        case Shape::Square: return "square";
        case Shape::Triangle: return "triangle";
        case Shape::Circle: return "circle";
    }
    throw ContractError("unknown shape");
}

std::string relation_words(Relation r) {
    switch (r) {
        case Relation::LeftOf: return "left of";
        case Relation::RightOf: return "right of";
        case Relation::Above: return "above";
        case Relation::Below: return "below";
    }
    throw ContractError("unknown relation");
}

const char* relation_name(Relation r) {
    switch (r) {
        case Relation::LeftOf: return "left_of";
        case Relation::RightOf: return "right_of";
        case Relation::Above: return "above";
        case Relation::Below: return "below";
    }
    throw ContractError("unknown relation");
}

Relation relation_from_name(const std::string& name) {
    if (name == "left_of") return Relation::LeftOf;
    if (name == "right_of") return Relation::RightOf;
    if (name == "above") return Relation::Above;
    if (name == "below") return Relation::Below;
    throw DataError("unknown relation name: " + name);
}

Color color_from_word(const std::string& word) {
    if (word == "red") return Color::Red;
    if (word == "blue") return Color::Blue;
    if (word == "green") return Color::Green;
    if (word == "yellow") return Color::Yellow;
    throw DataError("unknown color word: " + word);
}

Shape shape_from_word(const std::string& word) {
    if (word == "square") return Shape::Square;
    if (word == "triangle") return Shape::Triangle;
    if (word == "circle") return Shape::Circle;
    throw DataError("unknown shape word: " + word);
}

Relation inverse(Relation r) {
    switch (r) {
        case Relation::LeftOf: return Relation::RightOf;
        case Relation::RightOf: return Relation::LeftOf;
        case Relation::Above: return Relation::Below;
        case Relation::Below: return Relation::Above;
    }
    throw ContractError("unknown relation");
}

std::string Scene::id() const {
    std::ostringstream os;
    os << to_word(a.color) << '-' << to_word(a.shape) << '|' << relation_name(relation) << '|'
       << to_word(b.color) << '-' << to_word(b.shape);
    return os.str();
}

std::vector<double> Scene::feature_vector() const {
    std::vector<double> f(kSceneFeatureDim, 0.0);
    int off = 0;
    f[off + static_cast<int>(a.color)] = 1.0;
    off += kNumColors;
    f[off + static_cast<int>(a.shape)] = 1.0;
    off += kNumShapes;
    f[off + static_cast<int>(relation)] = 1.0;
    off += kNumRelations;
    f[off + static_cast<int>(b.color)] = 1.0;
    off += kNumColors;
    f[off + static_cast<int>(b.shape)] = 1.0;
    return f;
}

const char* to_string(NegationStrategy s) {
    switch (s) {
        case NegationStrategy::LexicalNot: return "lexical_not";
        case NegationStrategy::RelationFlip: return "relation_flip";
    }
    throw ContractError("unknown negation strategy");
}

NegationStrategy negation_strategy_from_string(const std::string& s) {
    if (s == "lexical_not") return NegationStrategy::LexicalNot;
    if (s == "relation_flip") return NegationStrategy::RelationFlip;
    throw ContractError("unknown negation strategy: " + s);
}

uint64_t fnv1a(const void* data, std::size_t n, uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

Vocabulary::Vocabulary() {
    tokens_ = {"a",     "red",   "blue",  "green", "yellow", "square",
               "triangle", "circle", "left",  "right", "of",     "above",
               "below", "not",   "this",  "is",    "photo",  "<eos>"};
    uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& t : tokens_) {
        h = fnv1a(t.data(), t.size(), h);
        h = fnv1a("\n", 1, h);
    }
    hash_ = h;
}

int Vocabulary::index_of(const std::string& token) const {
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        if (tokens_[i] == token) return static_cast<int>(i);
    }
    throw VocabError("token not in vocabulary: \"" + token + "\"");
}

const std::string& Vocabulary::token_at(int index) const {
    if (index < 0 || index >= size()) {
        throw IndexError("vocabulary index " + std::to_string(index) + " outside [0, " +
                         std::to_string(size()) + ")");
    }
    return tokens_[index];
}

Scene sample_scene(Rng& rng) {
    std::uniform_int_distribution<int> color(0, kNumColors - 1);
    std::uniform_int_distribution<int> shape(0, kNumShapes - 1);
    std::uniform_int_distribution<int> rel(0, kNumRelations - 1);
    Scene s;
    do {
        s.a = {static_cast<Color>(color(rng)), static_cast<Shape>(shape(rng))};
        s.b = {static_cast<Color>(color(rng)), static_cast<Shape>(shape(rng))};
        s.relation = static_cast<Relation>(rel(rng));
    } while (!s.valid());
    return s;
}

namespace {

void append_object(std::ostringstream& os, const SceneObject& o) {
    os << "a " << to_word(o.color) << ' ' << to_word(o.shape);
}

}  // namespace

std::string render_caption(const Scene& s) {
    std::ostringstream os;
    append_object(os, s.a);
    os << ' ' << relation_words(s.relation) << ' ';
    append_object(os, s.b);
    return os.str();
}

std::string paraphrase_caption(const Scene& s) {
    Scene swapped{s.b, inverse(s.relation), s.a};
    return render_caption(swapped);
}

std::string negate_caption(const Scene& s, NegationStrategy strategy) {
    switch (strategy) {
        case NegationStrategy::LexicalNot: {
            std::ostringstream os;
            append_object(os, s.a);
            os << " not " << relation_words(s.relation) << ' ';
            append_object(os, s.b);
            return os.str();
        }
        case NegationStrategy::RelationFlip: {
            Scene flipped{s.a, inverse(s.relation), s.b};
            return render_caption(flipped);
        }
    }
    throw ContractError("unknown negation strategy");
}

std::optional<ParsedCaption> parse_caption(const std::string& caption, std::string* why) {
    std::vector<std::string> w;
    std::istringstream is(caption);
    std::string tok;
    while (is >> tok) w.push_back(tok);

    auto fail = [&](const std::string& reason) -> std::optional<ParsedCaption> {
        if (why) *why = reason;
        return std::nullopt;
    };

    // a <color> <shape> [not] <relation words> a <color> <shape>
    std::size_t i = 0;
    auto expect = [&](const char* word) {
        if (i >= w.size() || w[i] != word) return false;
        ++i;
        return true;
    };

    ParsedCaption out;
    try {
        if (!expect("a")) return fail("expected leading 'a'");
        if (i + 1 >= w.size()) return fail("truncated first object");
        out.proposition.a = {color_from_word(w[i]), shape_from_word(w[i + 1])};
        i += 2;
        if (i < w.size() && w[i] == "not") {
            out.negated = true;
            ++i;
        }
        if (i >= w.size()) return fail("missing relation");
        if (w[i] == "left" || w[i] == "right") {
            const bool left = w[i] == "left";
            ++i;
            if (!expect("of")) return fail("expected 'of' after '" + w[i - 1] + "'");
            out.proposition.relation = left ? Relation::LeftOf : Relation::RightOf;
        } else if (w[i] == "above" || w[i] == "below") {
            out.proposition.relation = w[i] == "above" ? Relation::Above : Relation::Below;
            ++i;
        } else {
            return fail("unknown relation word '" + w[i] + "'");
        }
        if (!expect("a")) return fail("expected 'a' before second object");
        if (i + 1 >= w.size()) return fail("truncated second object");
        out.proposition.b = {color_from_word(w[i]), shape_from_word(w[i + 1])};
        i += 2;
        if (i != w.size()) return fail("trailing tokens after second object");
    } catch (const DataError& e) {
        return fail(e.what());
    }
    return out;
}

bool caption_true_in_scene(const ParsedCaption& c, const Scene& s) {
    const Scene& p = c.proposition;
    const bool literal = p.a == s.a && p.b == s.b && p.relation == s.relation;
    const bool swapped = p.a == s.b && p.b == s.a && p.relation == inverse(s.relation);
    const bool holds = literal || swapped;
    return c.negated ? !holds : holds;
}

bool validate_triple(const CaptionTriple& t, const Scene& s, std::string* reason) {
    auto check = [&](const std::string& caption, bool want_true, const char* label) {
        std::string why;
        auto parsed = parse_caption(caption, &why);
        if (!parsed) {
            if (reason) *reason = std::string(label) + " unparseable: " + why;
            return false;
        }
        if (caption_true_in_scene(*parsed, s) != want_true) {
            if (reason) {
                *reason = std::string(label) + " is " + (want_true ? "false" : "true") +
                          " for scene " + s.id();
            }
            return false;
        }
        return true;
    };
    if (!check(t.original, true, "original")) return false;
    if (!check(t.paraphrase, true, "paraphrase")) return false;
    if (!check(t.negation, false, "negation")) return false;
    return true;
}

CaptionTriple make_triple(const Scene& s, NegationStrategy strategy) {
    CaptionTriple t;
    t.scene_id = s.id();
    t.original = render_caption(s);
    t.paraphrase = paraphrase_caption(s);
    t.negation = negate_caption(s, strategy);
    t.strategy = strategy;
    t.validated = validate_triple(t, s);
    return t;
}

}  // namespace semclip
