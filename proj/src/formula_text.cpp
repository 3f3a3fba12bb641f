#include "mcf/formula_text.hpp"

#include "mcf/error.hpp"

#include <cctype>
#include <charconv>
#include <optional>
#include <vector>

namespace mcf {

namespace {

struct Token {
    enum class Kind { Open, Close, Symbol, End };
    Kind kind;
    std::string text;
    int line;
    int column;
};

std::vector<Token> tokenize(std::string_view text)
{
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](char c) {
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++i;
    };
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(c);
        } else if (c == ';') {
            while (i < text.size() && text[i] != '\n')
                advance(text[i]);
        } else if (c == '(' || c == ')') {
            out.push_back({c == '(' ? Token::Kind::Open : Token::Kind::Close, std::string(1, c),
                           line, col});
            advance(c);
        } else {
            int l = line, cl = col;
            std::string sym;
            while (i < text.size()) {
                char d = text[i];
                if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ';')
                    break;
                if (!std::isprint(static_cast<unsigned char>(d)))
                    throw ParseError("non-ASCII or control character in input", line, col);
                sym.push_back(d);
                advance(d);
            }
            out.push_back({Token::Kind::Symbol, std::move(sym), l, cl});
        }
    }
    out.push_back({Token::Kind::End, "", line, col});
    return out;
}

class Parser {
public:
    explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

    ClassSpec class_spec()
    {
        Vocabulary vocab;
        expect_open("(vocab");
        expect_keyword("vocab");
        while (peek_is_open_with("rel")) {
            expect_open("(rel");
            expect_keyword("rel");
            RelationSymbol r;
            r.name = symbol("relation name");
            r.arity = integer("arity");
            expect_close();
            vocab.relations.push_back(std::move(r));
        }
        expect_open("(consts");
        expect_keyword("consts");
        vocab.num_constants = integer("constant count");
        expect_close();
        expect_close();

        expect_open("(sentence");
        expect_keyword("sentence");
        Formula sentence = formula();
        expect_close();
        expect_end();
        return ClassSpec{std::move(vocab), std::move(sentence)};
    }

    Formula single_formula()
    {
        Formula f = formula();
        expect_end();
        return f;
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    const Token& next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(const Token& t, const std::string& expected) const
    {
        std::string found = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
        throw ParseError("expected " + expected + ", found " + found, t.line, t.column);
    }

    bool peek_is_open_with(const char* keyword) const
    {
        return peek().kind == Token::Kind::Open && tokens_[pos_ + 1].kind == Token::Kind::Symbol &&
               tokens_[pos_ + 1].text == keyword;
    }

    void expect_open(const char* expected)
    {
        if (peek().kind != Token::Kind::Open)
            fail(peek(), expected);
        next();
    }

    void expect_close()
    {
        if (peek().kind != Token::Kind::Close)
            fail(peek(), "')'");
        next();
    }

    void expect_end()
    {
        if (peek().kind != Token::Kind::End)
            fail(peek(), "end of input");
    }

    void expect_keyword(const char* keyword)
    {
        if (peek().kind != Token::Kind::Symbol || peek().text != keyword)
            fail(peek(), std::string("'") + keyword + "'");
        next();
    }

    std::string symbol(const char* what)
    {
        if (peek().kind != Token::Kind::Symbol)
            fail(peek(), what);
        return next().text;
    }

    int integer(const char* what)
    {
        const Token& t = peek();
        if (t.kind != Token::Kind::Symbol)
            fail(t, what);
        int value = 0;
        const char* first = t.text.data();
        const char* last = first + t.text.size();
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last)
            fail(t, std::string(what) + " (integer)");
        next();
        return value;
    }

    Term term()
    {
        const Token& t = peek();
        if (t.kind != Token::Kind::Symbol)
            fail(t, "term (variable or aN)");
        if (looks_like_constant(t.text)) {
            int index = 0;
            auto [ptr, ec] =
                std::from_chars(t.text.data() + 1, t.text.data() + t.text.size(), index);
            if (ec != std::errc())
                fail(t, "constant index");
            next();
            return Term::cst(index);
        }
        if (is_reserved_word(t.text))
            fail(t, "term (variable or aN)");
        return Term::var(next().text);
    }

    Formula formula()
    {
        expect_open("'(' starting a formula");
        const Token& head = peek();
        if (head.kind != Token::Kind::Symbol)
            fail(head, "connective, quantifier or relation name");
        const std::string op = next().text;
        Formula out;
        if (op == "true") {
            out = Formula::truth();
        } else if (op == "false") {
            out = Formula::falsity();
        } else if (op == "=") {
            Term l = term();
            Term r = term();
            out = Formula::equals(std::move(l), std::move(r));
        } else if (op == "not") {
            out = Formula::negate(formula());
        } else if (op == "and" || op == "or" || op == "implies" || op == "iff") {
            Formula a = formula();
            Formula b = formula();
            if (op == "and")
                out = Formula::conj(a, b);
            else if (op == "or")
                out = Formula::disj(a, b);
            else if (op == "implies")
                out = Formula::implies(a, b);
            else
                out = Formula::iff(a, b);
        } else if (op == "exists" || op == "forall") {
            std::string v = variable();
            Formula body = formula();
            out = op == "exists" ? Formula::exists(v, body) : Formula::forall(v, body);
        } else if (op == "count") {
            int r = integer("residue");
            int m = integer("modulus");
            std::string v = variable();
            out = Formula::count(r, m, v, formula());
        } else if (op == "existsrel" || op == "forallrel") {
            std::string name = symbol("relation name");
            int arity = integer("arity");
            Formula body = formula();
            out = op == "existsrel" ? Formula::exists_rel(name, arity, body)
                                    : Formula::forall_rel(name, arity, body);
        } else if (op == "existsrel-sub" || op == "forallrel-sub") {
            std::string name = symbol("relation name");
            std::string guard = symbol("guard relation name");
            Formula body = formula();
            out = op == "existsrel-sub" ? Formula::exists_rel_sub(name, guard, body)
                                        : Formula::forall_rel_sub(name, guard, body);
        } else if (is_reserved_word(op)) {
            fail(head, "connective, quantifier or relation name");
        } else {
            std::vector<Term> args;
            while (peek().kind == Token::Kind::Symbol)
                args.push_back(term());
            out = Formula::atom(op, std::move(args));
        }
        expect_close();
        return out;
    }

    std::string variable()
    {
        const Token& t = peek();
        if (t.kind != Token::Kind::Symbol || looks_like_constant(t.text) || is_reserved_word(t.text))
            fail(t, "variable name");
        return next().text;
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

void print_into(const Formula& f, std::string& out)
{
    out += '(';
    switch (f.kind()) {
    case FormulaKind::True: out += "true"; break;
    case FormulaKind::False: out += "false"; break;
    case FormulaKind::Atom:
        out += f.symbol();
        for (const auto& t : f.terms()) {
            out += ' ';
            out += print_term(t);
        }
        break;
    case FormulaKind::Equals:
        out += "= " + print_term(f.terms()[0]) + " " + print_term(f.terms()[1]);
        break;
    case FormulaKind::Exists:
    case FormulaKind::Forall:
        out += to_string(f.kind());
        out += ' ' + f.symbol() + ' ';
        print_into(f.body(), out);
        break;
    case FormulaKind::Count:
        out += "count " + std::to_string(f.residue()) + " " + std::to_string(f.modulus()) + " " +
               f.symbol() + " ";
        print_into(f.body(), out);
        break;
    case FormulaKind::ExistsRel:
    case FormulaKind::ForallRel:
        out += to_string(f.kind());
        out += ' ' + f.symbol() + ' ' + std::to_string(f.rel_arity()) + ' ';
        print_into(f.body(), out);
        break;
    case FormulaKind::ExistsRelGuarded:
    case FormulaKind::ForallRelGuarded:
        out += to_string(f.kind());
        out += ' ' + f.symbol() + ' ' + f.guard() + ' ';
        print_into(f.body(), out);
        break;
    default:
        out += to_string(f.kind());
        for (const auto& c : f.children()) {
            out += ' ';
            print_into(c, out);
        }
    }
    out += ')';
}

} // namespace

ClassSpec parse_class_spec(std::string_view text)
{
    Parser p(text);
    ClassSpec spec = p.class_spec();
    auto violations = validate_class_spec(spec);
    if (!violations.empty()) {
        std::string msg = "class spec does not validate:";
        for (const auto& v : violations)
            msg += "\n  " + v;
        throw ValidationError(msg);
    }
    return spec;
}

Formula parse_formula(std::string_view text)
{
    return Parser(text).single_formula();
}

std::string print_term(const Term& t)
{
    return t.is_constant() ? "a" + std::to_string(t.constant) : t.variable;
}

std::string print_formula(const Formula& f)
{
    std::string out;
    print_into(f, out);
    return out;
}

std::string print_class_spec(const ClassSpec& spec)
{
    std::string out = "(vocab";
    for (const auto& r : spec.vocab.relations)
        out += " (rel " + r.name + " " + std::to_string(r.arity) + ")";
    out += " (consts " + std::to_string(spec.vocab.num_constants) + "))\n";
    out += "(sentence " + print_formula(spec.sentence) + ")\n";
    return out;
}

} // namespace mcf
