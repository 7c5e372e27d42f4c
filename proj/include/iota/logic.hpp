#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace iota {

// A term in clause syntax: constant (lowercase-first or quoted), variable
// (uppercase-first) or compound functor(args...).
struct Term {
    enum class Kind { Constant, Variable, Compound };

    Kind kind = Kind::Constant;
    std::string name;
    std::vector<Term> args;

    static Term constant(std::string name) { return {Kind::Constant, std::move(name), {}}; }
    static Term variable(std::string name) { return {Kind::Variable, std::move(name), {}}; }
    static Term compound(std::string functor, std::vector<Term> args) {
        return {Kind::Compound, std::move(functor), std::move(args)};
    }

    bool is_ground() const;
    bool operator==(const Term&) const = default;
    bool operator<(const Term& other) const;
};

struct Atom {
    std::string predicate;
    std::vector<Term> args;

    bool is_ground() const;
    bool operator==(const Atom&) const = default;
    bool operator<(const Atom& other) const;
};

struct HornRule {
    Atom head;
    std::vector<Atom> body;
    std::string label;

    bool operator==(const HornRule&) const = default;
};

struct LogicProgram {
    std::vector<Atom> facts;
    std::vector<HornRule> rules;
};

// Convenience builders: arguments starting with an uppercase letter become
// variables, everything else constants.
Atom atom(std::string predicate, std::initializer_list<std::string_view> args = {});
Term term(std::string_view text);

std::string to_string(const Term& term);
std::string to_string(const Atom& atom);
// Multi-line clause as written to program.pl; the label is emitted as a comment.
std::string to_string(const HornRule& rule);
std::string to_string(const LogicProgram& program);

// Parses "pred(a, 'B-1', f(X))". Throws ProgramError on malformed input.
Atom parse_atom(std::string_view text);

void collect_variables(const Term& term, std::vector<std::string>& out);
void collect_variables(const Atom& atom, std::vector<std::string>& out);

// Every head variable occurs in the body.
bool is_range_restricted(const HornRule& rule);

}  // namespace iota
