#include "iota/logic.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "iota/errors.hpp"

namespace iota {

namespace {

bool is_plain_constant(std::string_view name) {
    if (name.empty() || !std::islower(static_cast<unsigned char>(name.front()))) return false;
    return std::all_of(name.begin(), name.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

void append_args(std::string& out, const std::vector<Term>& args) {
    if (args.empty()) return;
    out += '(';
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ", ";
        out += to_string(args[i]);
    }
    out += ')';
}

class AtomParser {
public:
    explicit AtomParser(std::string_view text) : text_(text) {}

    Atom parse() {
        skip_ws();
        Term head = parse_term();
        skip_ws();
        if (pos_ != text_.size()) fail("trailing characters");
        if (head.kind == Term::Kind::Variable) fail("atom cannot be a variable");
        return Atom{std::move(head.name), std::move(head.args)};
    }

private:
    [[noreturn]] void fail(const std::string& why) const {
        throw ProgramError("malformed atom '" + std::string(text_) + "' at column " +
                           std::to_string(pos_ + 1) + ": " + why);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    Term parse_term() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end");
        if (text_[pos_] == '\'') {
            std::size_t end = text_.find('\'', pos_ + 1);
            if (end == std::string_view::npos) fail("unterminated quote");
            std::string name(text_.substr(pos_ + 1, end - pos_ - 1));
            pos_ = end + 1;
            return Term::constant(std::move(name));
        }
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        if (start == pos_) fail("expected identifier");
        std::string name(text_.substr(start, pos_ - start));
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '(') {
            ++pos_;
            std::vector<Term> args;
            while (true) {
                args.push_back(parse_term());
                skip_ws();
                if (pos_ >= text_.size()) fail("unterminated argument list");
                if (text_[pos_] == ',') {
                    ++pos_;
                    continue;
                }
                if (text_[pos_] == ')') {
                    ++pos_;
                    break;
                }
                fail("expected ',' or ')'");
            }
            return Term::compound(std::move(name), std::move(args));
        }
        if (std::isupper(static_cast<unsigned char>(name.front())) || name.front() == '_')
            return Term::variable(std::move(name));
        return Term::constant(std::move(name));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

bool Term::is_ground() const {
    if (kind == Kind::Variable) return false;
    return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_ground(); });
}

bool Term::operator<(const Term& other) const {
    if (kind != other.kind) return kind < other.kind;
    if (name != other.name) return name < other.name;
    return std::lexicographical_compare(args.begin(), args.end(), other.args.begin(), other.args.end());
}

bool Atom::is_ground() const {
    return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_ground(); });
}

bool Atom::operator<(const Atom& other) const {
    if (predicate != other.predicate) return predicate < other.predicate;
    return std::lexicographical_compare(args.begin(), args.end(), other.args.begin(), other.args.end());
}

Term term(std::string_view text) {
    if (!text.empty() && std::isupper(static_cast<unsigned char>(text.front())))
        return Term::variable(std::string(text));
    return Term::constant(std::string(text));
}

Atom atom(std::string predicate, std::initializer_list<std::string_view> args) {
    Atom a{std::move(predicate), {}};
    a.args.reserve(args.size());
    for (auto arg : args) a.args.push_back(term(arg));
    return a;
}

std::string to_string(const Term& t) {
    std::string out;
    switch (t.kind) {
        case Term::Kind::Variable:
            return t.name;
        case Term::Kind::Constant:
            if (is_plain_constant(t.name)) return t.name;
            return "'" + t.name + "'";
        case Term::Kind::Compound:
            out = t.name;
            append_args(out, t.args);
            return out;
    }
    return out;
}

std::string to_string(const Atom& a) {
    std::string out = a.predicate;
    append_args(out, a.args);
    return out;
}

std::string to_string(const HornRule& rule) {
    std::string out;
    if (!rule.label.empty()) out += "% " + rule.label + "\n";
    out += to_string(rule.head);
    out += " :-";
    for (std::size_t i = 0; i < rule.body.size(); ++i) {
        out += "\n    ";
        out += to_string(rule.body[i]);
        out += (i + 1 == rule.body.size()) ? "." : ",";
    }
    out += '\n';
    return out;
}

std::string to_string(const LogicProgram& program) {
    std::ostringstream out;
    out << "% facts\n";
    for (const auto& fact : program.facts) out << to_string(fact) << ".\n";
    out << "\n% rules\n";
    for (const auto& rule : program.rules) out << '\n' << to_string(rule);
    return out.str();
}

Atom parse_atom(std::string_view text) {
    while (!text.empty() && (text.back() == '.' || std::isspace(static_cast<unsigned char>(text.back()))))
        text.remove_suffix(1);
    return AtomParser(text).parse();
}

void collect_variables(const Term& t, std::vector<std::string>& out) {
    if (t.kind == Term::Kind::Variable) {
        if (std::find(out.begin(), out.end(), t.name) == out.end()) out.push_back(t.name);
        return;
    }
    for (const auto& arg : t.args) collect_variables(arg, out);
}

void collect_variables(const Atom& a, std::vector<std::string>& out) {
    for (const auto& arg : a.args) collect_variables(arg, out);
}

bool is_range_restricted(const HornRule& rule) {
    std::vector<std::string> head_vars;
    std::vector<std::string> body_vars;
    collect_variables(rule.head, head_vars);
    for (const auto& b : rule.body) collect_variables(b, body_vars);
    return std::all_of(head_vars.begin(), head_vars.end(), [&](const std::string& v) {
        return std::find(body_vars.begin(), body_vars.end(), v) != body_vars.end();
    });
}

}  // namespace iota
