#include "iota/app_semantics.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "iota/errors.hpp"
#include "iota/lexicon_data.hpp"

namespace iota {

namespace {

using ojson = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& code, const std::string& message) {
    throw AppSemanticsError(code, message);
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '\'' || c == '-';
}

std::string trim(std::string_view s, std::string_view junk = " \t\r\n") {
    const auto b = s.find_first_not_of(junk);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(junk);
    return std::string(s.substr(b, e - b + 1));
}

// Curly quotes become ASCII, runs of whitespace collapse to one space.
std::string canonical_text(std::string_view s) {
    std::string ascii;
    ascii.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xE2 && static_cast<unsigned char>(s[i + 1]) == 0x80) {
            const auto third = static_cast<unsigned char>(s[i + 2]);
            if (third == 0x9C || third == 0x9D) { ascii += '"'; i += 2; continue; }
            if (third == 0x98 || third == 0x99) { ascii += '\''; i += 2; continue; }
        }
        ascii += s[i];
    }
    std::string out;
    bool space = false;
    for (char c : ascii) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            space = true;
            continue;
        }
        if (space && !out.empty()) out += ' ';
        space = false;
        out += c;
    }
    return out;
}

// Per-byte flag: true inside a quoted payload (quote characters included).
// A single quote opens only at a word start, so apostrophes in "don't" are
// left alone.
std::vector<bool> quote_mask(const std::string& s) {
    std::vector<bool> mask(s.size(), false);
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        const bool opens = c == '"' || (c == '\'' && (i == 0 || !std::isalnum(static_cast<unsigned char>(s[i - 1]))));
        if (!opens) { ++i; continue; }
        std::size_t j = i + 1;
        for (; j < s.size(); ++j) {
            if (s[j] != c) continue;
            if (c == '"') break;
            if (j + 1 == s.size() || !std::isalnum(static_cast<unsigned char>(s[j + 1]))) break;
        }
        if (j >= s.size()) { ++i; continue; }  // unbalanced: treat as plain text
        for (std::size_t k = i; k <= j; ++k) mask[k] = true;
        i = j + 1;
    }
    return mask;
}

struct Word {
    std::string text;  // original spelling
    std::string key;   // lowercase
    std::size_t begin = 0;
    std::size_t end = 0;
};

// Words outside quoted payloads.
std::vector<Word> words_outside_quotes(const std::string& s, const std::vector<bool>& mask) {
    std::vector<Word> out;
    std::size_t i = 0;
    while (i < s.size()) {
        if (mask[i] || !std::isalnum(static_cast<unsigned char>(s[i]))) { ++i; continue; }
        std::size_t j = i;
        while (j < s.size() && !mask[j] && is_word_char(s[j])) ++j;
        std::string text = s.substr(i, j - i);
        while (!text.empty() && (text.back() == '\'' || text.back() == '-')) text.pop_back();
        out.push_back({text, lower(text), i, i + text.size()});
        i = j;
    }
    return out;
}

std::string strip_terminal(std::string_view s) {
    return trim(s, " \t\r\n.!?;,");
}

bool is_marker(const std::vector<Word>& words, std::size_t i, std::size_t& length) {
    static const std::set<std::string, std::less<>> single{"if", "when", "whenever", "once", "while"};
    if (single.count(words[i].key)) { length = 1; return true; }
    if (words[i].key == "in" && i + 1 < words.size() && words[i + 1].key == "case") { length = 2; return true; }
    return false;
}

// Token-sequence containment: does `phrase` occur contiguously in `tokens`?
bool contains_phrase(const std::vector<std::string>& tokens, const std::vector<std::string>& phrase) {
    if (phrase.empty() || phrase.size() > tokens.size()) return false;
    for (std::size_t i = 0; i + phrase.size() <= tokens.size(); ++i)
        if (std::equal(phrase.begin(), phrase.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) return true;
    return false;
}

std::vector<std::string> split_words(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (is_word_char(c)) {
            cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::string quote(std::string_view s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'' || c == '\\') out += '\\';
        out += c;
    }
    return out + "'";
}

std::string list_literal(const std::vector<std::string>& items) {
    std::string out = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += quote(items[i]);
    }
    return out + "]";
}

std::set<std::string, std::less<>> string_set(const ojson& j, const char* key) {
    std::set<std::string, std::less<>> out;
    if (!j.contains(key)) return out;
    for (const auto& item : j.at(key)) out.insert(lower(item.get<std::string>()));
    return out;
}

std::vector<std::string> string_vector(const ojson& j) {
    std::vector<std::string> out;
    for (const auto& item : j) out.push_back(lower(item.get<std::string>()));
    return out;
}

const LexiconRole* find_role(const Lexicon& lexicon, std::string_view role, LexiconSide side) {
    for (const auto& r : lexicon.roles)
        if (r.side == side && r.role == role) return &r;
    return nullptr;
}

struct RoleScore {
    std::size_t hits = 0;
    std::size_t length = 0;
};

RoleScore score_role(const LexiconRole& role, const std::vector<std::string>& noun_tokens) {
    RoleScore s;
    for (const auto& kw : role.keywords) {
        const auto phrase = split_words(kw);
        if (contains_phrase(noun_tokens, phrase)) {
            ++s.hits;
            s.length += kw.size();
        }
    }
    return s;
}

// Best-scoring role among candidates; nullptr when nothing scores.
const LexiconRole* best_role(const std::vector<const LexiconRole*>& candidates, const std::vector<std::string>& noun_tokens) {
    const LexiconRole* best = nullptr;
    RoleScore best_score;
    for (const LexiconRole* role : candidates) {
        const RoleScore s = score_role(*role, noun_tokens);
        if (s.hits == 0) continue;
        if (!best || s.hits > best_score.hits || (s.hits == best_score.hits && s.length > best_score.length)) {
            best = role;
            best_score = s;
        }
    }
    return best;
}

// First event of the role signalled by any of the tokens.
std::optional<std::string> match_event(const LexiconRole& role, const std::vector<std::string>& tokens) {
    for (const auto& [event, words] : role.events)
        for (const auto& w : words)
            if (std::find(tokens.begin(), tokens.end(), w) != tokens.end()) return event;
    return std::nullopt;
}

// Longest command phrase found in the verb phrase.
std::optional<std::string> match_command(const Lexicon& lexicon, const std::vector<std::string>& verb_tokens) {
    std::optional<std::string> best;
    std::size_t best_len = 0;
    for (const auto& [command, phrases] : lexicon.commands)
        for (const auto& p : phrases) {
            const auto words = split_words(p);
            if (words.size() > best_len && contains_phrase(verb_tokens, words)) {
                best = command;
                best_len = words.size();
            }
        }
    return best;
}

bool has_negation(std::string_view sentence, const Lexicon& lexicon) {
    const std::string s = canonical_text(sentence);
    for (const auto& w : words_outside_quotes(s, quote_mask(s)))
        if (lexicon.negations.count(w.key)) return true;
    return false;
}

// Device-map key -> lexicon role on the given side.
const LexiconRole* resolve_key(std::string_view key, LexiconSide side, const Lexicon& lexicon) {
    const std::string k = lower(trim(key));
    for (const auto& r : lexicon.roles)
        if (r.side == side && lower(r.role) == k) return &r;
    std::vector<const LexiconRole*> candidates;
    for (const auto& r : lexicon.roles)
        if (r.side == side) candidates.push_back(&r);
    return best_role(candidates, split_words(k));
}

const DeviceSpec& bind_role(const std::string& role, LexiconSide side, const AppSpec& app, const SystemConfig& config,
                            const Lexicon& lexicon) {
    const LexiconRole* lex = find_role(lexicon, role, side);
    if (!lex) fail("unknown-role", "role '" + role + "' is not in the lexicon");
    const std::string* device_name = nullptr;
    for (const auto& [key, device] : app.device_map)
        if (lower(key) == lower(role)) device_name = &device;
    if (!device_name)
        for (const auto& [key, device] : app.device_map)
            if (resolve_key(key, side, lexicon) == lex) {
                device_name = &device;
                break;
            }
    if (!device_name) fail("missing-role", "app '" + app.app_name + "' has no device for role '" + role + "'");
    const DeviceSpec* dev = config.find_device(*device_name);
    if (!dev) fail("unknown-device", "app '" + app.app_name + "' maps role '" + role + "' to unknown device '" + *device_name + "'");
    if (std::find(lex->types.begin(), lex->types.end(), dev->type) == lex->types.end())
        fail("type-mismatch", "app '" + app.app_name + "' maps role '" + role + "' to " + dev->name + " of type " +
                                  std::string(to_string(dev->type)));
    return *dev;
}

enum class Tag { DT, JJ, NN, VB, Copula, RP, Skip };

}  // namespace

std::string_view to_string(Connective c) {
    switch (c) {
        case Connective::And: return "AND";
        case Connective::Or: return "OR";
        case Connective::None: return "NONE";
    }
    return "NONE";
}

// ---- lexicon ---------------------------------------------------------------

Lexicon Lexicon::from_json(std::string_view document) {
    ojson j;
    try {
        j = ojson::parse(document);
    } catch (const ojson::exception& e) {
        throw ConfigError(std::string("lexicon: ") + e.what());
    }
    try {
        Lexicon lex;
        lex.determiners = string_set(j, "determiners");
        lex.particles = string_set(j, "particles");
        lex.copulas = string_set(j, "copulas");
        lex.verbs = string_set(j, "verbs");
        lex.adjectives = string_set(j, "adjectives");
        lex.skip = string_set(j, "skip");
        lex.negations = string_set(j, "negations");
        for (const auto& [command, phrases] : j.at("commands").items())
            lex.commands.emplace_back(command, string_vector(phrases));
        for (const auto& r : j.at("roles")) {
            LexiconRole role;
            role.role = r.at("role").get<std::string>();
            const std::string side = r.at("side").get<std::string>();
            if (side == "trigger") role.side = LexiconSide::Trigger;
            else if (side == "action") role.side = LexiconSide::Action;
            else throw ConfigError("lexicon: role '" + role.role + "' has unknown side '" + side + "'");
            for (const auto& t : r.at("types")) {
                auto type = parse_device_type(t.get<std::string>());
                if (!type) throw ConfigError("lexicon: unknown device type '" + t.get<std::string>() + "'");
                role.types.push_back(*type);
            }
            role.keywords = string_vector(r.at("keywords"));
            if (r.contains("events"))
                for (const auto& [event, words] : r.at("events").items())
                    role.events.emplace_back(event, string_vector(words));
            if (r.contains("commands")) role.commands = string_vector(r.at("commands"));
            lex.roles.push_back(std::move(role));
        }
        return lex;
    } catch (const ojson::exception& e) {
        throw ConfigError(std::string("lexicon: ") + e.what());
    }
}

Lexicon Lexicon::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open lexicon file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

const Lexicon& Lexicon::builtin() {
    static const Lexicon lex = from_json(detail::kBuiltinLexicon);
    return lex;
}

// ---- clause and conjunct splitting ----------------------------------------

ClauseSplit split_clauses(std::string_view description) {
    const std::string text = canonical_text(description);
    if (trim(text).empty()) fail("empty-description", "app description is empty");
    const auto mask = quote_mask(text);
    const auto words = words_outside_quotes(text, mask);

    std::size_t marker = words.size(), marker_len = 0;
    for (std::size_t i = 0; i < words.size(); ++i)
        if (is_marker(words, i, marker_len)) {
            marker = i;
            break;
        }
    if (marker == words.size()) return {"", trim(text)};

    const std::size_t after = words[marker + marker_len - 1].end;
    if (marker > 0) {
        return {strip_terminal(std::string_view(text).substr(after)),
                strip_terminal(std::string_view(text).substr(0, words[marker].begin))};
    }

    // Leading marker: the conditional runs up to the first unquoted comma.
    for (std::size_t i = after; i < text.size(); ++i)
        if (text[i] == ',' && !mask[i])
            return {strip_terminal(std::string_view(text).substr(after, i - after)),
                    strip_terminal(std::string_view(text).substr(i + 1))};

    // No comma: the main clause starts at the first later command phrase.
    const Lexicon& lex = Lexicon::builtin();
    for (std::size_t w = marker + marker_len + 1; w < words.size(); ++w)
        for (const auto& [command, phrases] : lex.commands)
            for (const auto& p : phrases) {
                const auto pw = split_words(p);
                if (w + pw.size() > words.size()) continue;
                bool ok = true;
                for (std::size_t k = 0; k < pw.size() && ok; ++k) ok = words[w + k].key == pw[k];
                if (ok)
                    return {strip_terminal(std::string_view(text).substr(after, words[w].begin - after)),
                            strip_terminal(std::string_view(text).substr(words[w].begin))};
            }
    return {strip_terminal(std::string_view(text).substr(after)), ""};
}

ConjunctSplit split_conjuncts(std::string_view clause) {
    const std::string text = strip_terminal(canonical_text(clause));
    if (text.empty()) fail("empty-clause", "clause is empty");
    const auto mask = quote_mask(text);
    const auto words = words_outside_quotes(text, mask);

    bool saw_and = false, saw_or = false;
    std::vector<std::pair<std::size_t, std::size_t>> cuts;  // [begin, end) of separators
    for (const auto& w : words) {
        if (w.key == "and") saw_and = true;
        else if (w.key == "or") saw_or = true;
        else continue;
        cuts.emplace_back(w.begin, w.end);
    }
    if (saw_and && saw_or) fail("mixed-connectives", "clause mixes 'and' with 'or': " + text);
    if (cuts.empty()) return {Connective::None, {text}};

    // Commas separate list items once a connective is present.
    for (std::size_t i = 0; i < text.size(); ++i)
        if (text[i] == ',' && !mask[i]) cuts.emplace_back(i, i + 1);
    std::sort(cuts.begin(), cuts.end());

    ConjunctSplit out{saw_and ? Connective::And : Connective::Or, {}};
    std::size_t pos = 0;
    for (const auto& [b, e] : cuts) {
        if (b < pos) continue;  // ", and"
        std::string piece = trim(std::string_view(text).substr(pos, b - pos), " \t,");
        if (!piece.empty() || !(pos > 0 && text.compare(pos - 1, 1, ",") == 0)) out.sentences.push_back(piece);
        pos = e;
    }
    out.sentences.push_back(trim(std::string_view(text).substr(pos), " \t,"));
    for (const auto& s : out.sentences)
        if (s.empty()) fail("empty-conjunct", "clause has an empty conjunct: " + text);
    return out;
}

// ---- phrase chunking -------------------------------------------------------

Phrases extract_phrases(std::string_view simple_sentence, const Lexicon& lexicon) {
    std::string text = canonical_text(simple_sentence);
    const auto mask = quote_mask(text);
    Phrases out;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (!mask[i]) continue;
        std::size_t j = i;
        while (j < text.size() && mask[j]) ++j;
        if (!out.payload) out.payload = lower(strip_terminal(std::string_view(text).substr(i + 1, j - i - 2)));
        i = j;
    }
    const auto words = words_outside_quotes(text, mask);

    std::set<std::string, std::less<>> noun_words;
    for (const auto& r : lexicon.roles)
        for (const auto& kw : r.keywords)
            for (auto& w : split_words(kw)) noun_words.insert(std::move(w));

    std::vector<Tag> tags;
    for (std::size_t i = 0; i < words.size(); ++i) {
        const std::string& k = words[i].key;
        const Tag prev = i ? tags.back() : Tag::Skip;
        const bool in_np = i && (prev == Tag::DT || prev == Tag::JJ || prev == Tag::NN);
        Tag t;
        if (lexicon.skip.count(k) || lexicon.negations.count(k)) t = Tag::Skip;
        else if (lexicon.determiners.count(k)) t = Tag::DT;
        else if (lexicon.copulas.count(k)) t = Tag::Copula;
        else if (lexicon.verbs.count(k)) {
            const bool nominal = prev == Tag::DT || prev == Tag::JJ || (in_np && noun_words.count(k));
            t = nominal ? Tag::NN : Tag::VB;
        } else if (lexicon.particles.count(k)) t = Tag::RP;
        else if (lexicon.adjectives.count(k)) t = Tag::JJ;
        else t = Tag::NN;
        tags.push_back(t);
    }

    auto join = [&](std::size_t b, std::size_t e) {
        return text.substr(words[b].begin, words[e - 1].end - words[b].begin);
    };

    bool have_np = false, have_vp = false;
    std::size_t i = 0;
    while (i < words.size() && !(have_np && have_vp)) {
        const Tag t = tags[i];
        if (!have_np && (t == Tag::DT || t == Tag::JJ || t == Tag::NN)) {
            std::size_t j = i;
            if (tags[j] == Tag::DT) ++j;
            while (j < words.size() && tags[j] == Tag::JJ) ++j;
            const std::size_t nouns = j;
            while (j < words.size() && tags[j] == Tag::NN) ++j;
            if (j > nouns) {
                out.noun_phrase = join(i, j);
                have_np = true;
                i = j;
                continue;
            }
        }
        if (!have_vp && (t == Tag::VB || t == Tag::Copula)) {
            std::size_t j = i + 1;
            if (t == Tag::Copula) {
                while (j < words.size() && (tags[j] == Tag::JJ || tags[j] == Tag::VB || tags[j] == Tag::RP)) ++j;
            } else if (j < words.size() && tags[j] == Tag::RP) {
                ++j;
            }
            out.verb_phrase = join(i, j);
            have_vp = true;
            i = j;
            continue;
        }
        ++i;
    }
    if (!have_np || !have_vp)
        fail("no-phrase", "no " + std::string(!have_np ? "noun" : "verb") + " phrase in '" + trim(text) + "'");
    return out;
}

// ---- lexicon matching ------------------------------------------------------

LexiconMatch match_lexicon(const Phrases& phrases, LexiconSide side, const Lexicon& lexicon) {
    const auto noun_tokens = split_words(phrases.noun_phrase);
    const auto verb_tokens = split_words(phrases.verb_phrase);
    std::vector<std::string> all_tokens = noun_tokens;
    all_tokens.insert(all_tokens.end(), verb_tokens.begin(), verb_tokens.end());
    const std::string shown = "(" + phrases.noun_phrase + ", " + phrases.verb_phrase + ")";

    std::vector<const LexiconRole*> candidates;
    if (side == LexiconSide::Action) {
        const auto command = match_command(lexicon, verb_tokens);
        if (!command) fail("unmatched-phrase", "no device command matches " + shown);
        for (const auto& r : lexicon.roles)
            if (r.side == side && std::find(r.commands.begin(), r.commands.end(), *command) != r.commands.end())
                candidates.push_back(&r);
        const LexiconRole* role = best_role(candidates, noun_tokens);
        if (!role) fail("unmatched-phrase", "no device supporting '" + *command + "' matches " + shown);
        return {role->role, *command};
    }

    for (const auto& r : lexicon.roles) {
        if (r.side != side) continue;
        const bool voice = phrases.payload && std::any_of(r.events.begin(), r.events.end(),
                                                         [](const auto& e) { return e.first == "voice"; });
        if (voice || match_event(r, all_tokens)) candidates.push_back(&r);
    }
    const LexiconRole* role = best_role(candidates, noun_tokens);
    if (!role) fail("unmatched-phrase", "no sensor event matches " + shown);
    const auto event = match_event(*role, all_tokens);
    if (event == "voice" || (!event && phrases.payload)) {
        if (!phrases.payload) fail("missing-payload", "voice trigger without a quoted command " + shown);
        return {role->role, "voice:" + *phrases.payload};
    }
    return {role->role, *event};
}

// ---- tuples ----------------------------------------------------------------

std::string to_string(const SemanticTuple& t) {
    return "(" + quote(to_string(t.trigger_connective)) + ", " + list_literal(t.trigger_roles) + ", " +
           list_literal(t.trigger_actions) + ", " + quote(to_string(t.action_connective)) + ", " +
           list_literal(t.action_roles) + ", " + list_literal(t.action_verbs) + ")";
}

std::string to_string(const ConjunctSplit& split) {
    return "(" + quote(to_string(split.connective)) + ", " + list_literal(split.sentences) + ")";
}

SemanticTuple extract_semantics(std::string_view description, const Lexicon& lexicon) {
    const ClauseSplit clauses = split_clauses(description);
    if (clauses.conditional.empty()) fail("no-trigger", "no conditional clause in '" + std::string(description) + "'");
    if (clauses.main.empty()) fail("no-action", "no main clause in '" + std::string(description) + "'");

    const ConjunctSplit triggers = split_conjuncts(clauses.conditional);
    const ConjunctSplit actions = split_conjuncts(clauses.main);
    if (actions.connective == Connective::Or)
        fail("or-action", "alternative actions cannot be expressed as rules: '" + clauses.main + "'");

    SemanticTuple tuple;
    tuple.trigger_connective = triggers.connective;
    tuple.action_connective = actions.connective;
    for (const auto& s : triggers.sentences) {
        if (has_negation(s, lexicon)) fail("negated-trigger", "negated trigger '" + s + "'");
        const LexiconMatch m = match_lexicon(extract_phrases(s, lexicon), LexiconSide::Trigger, lexicon);
        tuple.trigger_roles.push_back(m.role);
        tuple.trigger_actions.push_back(m.predicate);
    }
    for (const auto& s : actions.sentences) {
        if (has_negation(s, lexicon)) fail("negated-action", "negated action '" + s + "'");
        const LexiconMatch m = match_lexicon(extract_phrases(s, lexicon), LexiconSide::Action, lexicon);
        tuple.action_roles.push_back(m.role);
        tuple.action_verbs.push_back(m.predicate);
    }
    return tuple;
}

// ---- binding ---------------------------------------------------------------

Atom event_atom(std::string_view event, const std::string& device) {
    const Term d = Term::constant(device);
    if (event.rfind("voice:", 0) == 0) {
        const std::string phrase = normalize_identifier(event.substr(6));
        if (phrase.empty()) fail("missing-payload", "empty voice command");
        return {"speakerHears", {d, Term::constant(phrase)}};
    }
    if (event == "motion") return {"reportsMotion", {d}};
    if (event == "open") return {"open", {d}};
    if (event == "closed") return {"closed", {d}};
    if (event == "smoke") return {"reportsSmoke", {d}};
    if (event == "water") return {"reportsWater", {d}};
    if (event == "ring") return {"reportsRing", {d}};
    for (const char* level : {"high", "low"}) {
        const std::string prefix = std::string(level) + " ";
        if (event.rfind(prefix, 0) == 0) {
            const std::string channel(event.substr(prefix.size()));
            std::string pred = level == std::string("high") ? "reportsHigh" : "reportsLow";
            return {pred, {d, Term::constant(channel)}};
        }
    }
    fail("unknown-event", "no event predicate for '" + std::string(event) + "'");
}

Atom command_atom(std::string_view command, const std::string& device) {
    static const std::set<std::string, std::less<>> known{"on", "off", "open", "close", "lock", "unlock"};
    if (!known.count(command)) fail("unknown-command", "no command predicate for '" + std::string(command) + "'");
    return {std::string(command), {Term::constant(device)}};
}

BoundAppRule bind_app(const SemanticTuple& tuple, const AppSpec& app, const SystemConfig& config, const Lexicon& lexicon) {
    if (tuple.trigger_roles.size() != tuple.trigger_actions.size() || tuple.action_roles.size() != tuple.action_verbs.size())
        fail("malformed-tuple", "roles and predicates differ in count for app '" + app.app_name + "'");
    if (tuple.trigger_roles.empty() || tuple.action_roles.empty())
        fail("malformed-tuple", "app '" + app.app_name + "' needs at least one trigger and one action");

    BoundAppRule rule;
    rule.app_name = app.app_name;
    rule.trigger_connective = tuple.trigger_connective;
    for (std::size_t i = 0; i < tuple.trigger_roles.size(); ++i) {
        const DeviceSpec& dev = bind_role(tuple.trigger_roles[i], LexiconSide::Trigger, app, config, lexicon);
        rule.triggers.push_back({dev.name, event_atom(tuple.trigger_actions[i], dev.name)});
    }
    for (std::size_t i = 0; i < tuple.action_roles.size(); ++i) {
        const DeviceSpec& dev = bind_role(tuple.action_roles[i], LexiconSide::Action, app, config, lexicon);
        rule.actions.push_back({dev.name, command_atom(tuple.action_verbs[i], dev.name)});
    }
    return rule;
}

std::vector<AppOutcome> process_apps(const SystemConfig& config, const Lexicon& lexicon) {
    std::vector<AppOutcome> out;
    out.reserve(config.apps.size());
    for (const auto& app : config.apps) {
        AppOutcome o;
        o.app_name = app.app_name;
        try {
            o.tuple = extract_semantics(app.description, lexicon);
            o.rule = bind_app(*o.tuple, app, config, lexicon);
        } catch (const AppSemanticsError& e) {
            o.diagnostic_code = e.code();
            o.diagnostic = e.what();
        }
        out.push_back(std::move(o));
    }
    return out;
}

}  // namespace iota
