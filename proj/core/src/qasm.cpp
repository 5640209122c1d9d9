#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "limtdd/circuit.hpp"

namespace limtdd {

QasmError::QasmError(const std::string& msg, int line, int col)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg), line_(line), col_(col) {}

namespace {

enum class Tok { Ident, Int, Real, String, Sym, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1;
    int col = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view s) : src_(s) {}

    Token next() {
        skip();
        Token t;
        t.line = line_;
        t.col = col_;
        if (pos_ >= src_.size()) return t;
        const char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            t.kind = Tok::Ident;
            while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                t.text += get();
        } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            t.kind = Tok::Int;
            while (pos_ < src_.size() &&
                   (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.' || src_[pos_] == 'e' ||
                    src_[pos_] == 'E')) {
                if (!std::isdigit(static_cast<unsigned char>(src_[pos_]))) t.kind = Tok::Real;
                t.text += get();
            }
        } else if (c == '"') {
            t.kind = Tok::String;
            get();
            while (pos_ < src_.size() && src_[pos_] != '"') t.text += get();
            if (pos_ >= src_.size()) throw QasmError("unterminated string", t.line, t.col);
            get();
        } else {
            t.kind = Tok::Sym;
            t.text = std::string(1, get());
        }
        return t;
    }

private:
    char get() {
        const char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip() {
        while (pos_ < src_.size()) {
            if (std::isspace(static_cast<unsigned char>(src_[pos_]))) {
                get();
            } else if (src_.substr(pos_, 2) == "//") {
                while (pos_ < src_.size() && src_[pos_] != '\n') get();
            } else {
                break;
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    explicit Parser(std::string_view s) : lex_(s) { advance(); }

    Circuit run() {
        expect_ident("OPENQASM");
        if (cur_.kind != Tok::Real || cur_.text != "2.0") fail("expected version 2.0");
        advance();
        expect_sym(";");
        Circuit c;
        bool have_qreg = false;
        std::string qreg;
        while (cur_.kind != Tok::End) {
            const Token head = cur_;
            if (head.kind != Tok::Ident) fail("expected a statement");
            const std::string word = head.text;
            advance();
            if (word == "include") {
                if (cur_.kind != Tok::String) fail("expected file name");
                advance();
                expect_sym(";");
            } else if (word == "qreg") {
                if (have_qreg) fail_at(head, "only one qreg is supported");
                qreg = ident();
                expect_sym("[");
                c.n_qubits = integer();
                expect_sym("]");
                expect_sym(";");
                if (c.n_qubits <= 0) fail_at(head, "qreg size must be positive");
                have_qreg = true;
            } else if (word == "creg") {
                ident();
                expect_sym("[");
                integer();
                expect_sym("]");
                expect_sym(";");
            } else if (word == "barrier") {
                operand_list(qreg, c.n_qubits, have_qreg, true);
                expect_sym(";");
            } else {
                gate(word, head, c, qreg, have_qreg);
            }
        }
        if (!have_qreg) throw QasmError("missing qreg declaration", cur_.line, cur_.col);
        return c;
    }

private:
    void gate(const std::string& word, const Token& head, Circuit& c, const std::string& qreg, bool have_qreg) {
        static const std::map<std::string, GateKind> kinds = {
            {"x", GateKind::X},   {"y", GateKind::Y},     {"z", GateKind::Z},   {"h", GateKind::H},
            {"s", GateKind::S},   {"sdg", GateKind::Sdg}, {"t", GateKind::T},   {"tdg", GateKind::Tdg},
            {"cx", GateKind::CX}, {"CX", GateKind::CX},   {"cz", GateKind::CZ}, {"cp", GateKind::CP},
            {"cu1", GateKind::CP}};
        auto it = kinds.find(word);
        if (it == kinds.end()) fail_at(head, "unsupported gate '" + word + "'");
        if (!have_qreg) fail_at(head, "gate before qreg declaration");
        Angle a;
        if (it->second == GateKind::CP) {
            expect_sym("(");
            a = angle();
            expect_sym(")");
        } else if (is_sym("(")) {
            fail("gate '" + word + "' takes no parameter");
        }
        const Token at = cur_;
        std::vector<int> qs = operand_list(qreg, c.n_qubits, have_qreg, false);
        expect_sym(";");
        if (int(qs.size()) != gate_arity(it->second))
            fail_at(at, "gate '" + word + "' expects " + std::to_string(gate_arity(it->second)) + " operand(s)");
        if (qs.size() == 2 && qs[0] == qs[1]) fail_at(at, "operands must differ");
        c.add(it->second, qs, a);
    }

    std::vector<int> operand_list(const std::string& qreg, int n, bool have_qreg, bool allow_whole) {
        std::vector<int> qs;
        while (true) {
            const Token at = cur_;
            const std::string name = ident();
            if (!have_qreg || name != qreg) fail_at(at, "unknown register '" + name + "'");
            if (allow_whole && !is_sym("[")) {
                for (int i = 0; i < n; ++i) qs.push_back(i);
            } else {
                expect_sym("[");
                const Token it = cur_;
                const int i = integer();
                if (i >= n) fail_at(it, "qubit index out of range");
                expect_sym("]");
                qs.push_back(i);
            }
            if (!is_sym(",")) break;
            advance();
        }
        return qs;
    }

    // [-] [k *] pi [/ m]  |  0
    Angle angle() {
        const Token start = cur_;
        bool neg = false;
        if (is_sym("-")) {
            neg = true;
            advance();
        }
        std::int64_t k = 1, m = 1;
        if (cur_.kind == Tok::Int) {
            k = std::stoll(cur_.text);
            advance();
            if (k == 0 && !is_sym("*")) return Angle{0, 1};
            if (!is_sym("*")) fail_at(start, "angle must be a rational multiple of pi");
            advance();
        } else if (cur_.kind == Tok::Real) {
            fail_at(start, "angle must be a rational multiple of pi");
        }
        if (cur_.kind != Tok::Ident || cur_.text != "pi") fail_at(start, "angle must be a rational multiple of pi");
        advance();
        if (is_sym("/")) {
            advance();
            if (cur_.kind != Tok::Int) fail_at(start, "angle must be a rational multiple of pi");
            m = std::stoll(cur_.text);
            if (m == 0) fail("division by zero");
            advance();
        }
        return Angle{neg ? -k : k, m};
    }

    void advance() { cur_ = lex_.next(); }
    bool is_sym(const char* s) const { return cur_.kind == Tok::Sym && cur_.text == s; }

    [[noreturn]] void fail(const std::string& msg) const { throw QasmError(msg, cur_.line, cur_.col); }
    [[noreturn]] void fail_at(const Token& t, const std::string& msg) const { throw QasmError(msg, t.line, t.col); }

    void expect_sym(const char* s) {
        if (!is_sym(s)) fail(std::string("expected '") + s + "'");
        advance();
    }
    void expect_ident(const char* s) {
        if (cur_.kind != Tok::Ident || cur_.text != s) fail(std::string("expected '") + s + "'");
        advance();
    }
    std::string ident() {
        if (cur_.kind != Tok::Ident) fail("expected identifier");
        std::string s = cur_.text;
        advance();
        return s;
    }
    int integer() {
        if (cur_.kind != Tok::Int) fail("expected integer");
        const int v = std::stoi(cur_.text);
        advance();
        return v;
    }

    Lexer lex_;
    Token cur_;
};

}  // namespace

Circuit parse_qasm(std::string_view text) { return Parser(text).run(); }

Circuit load_qasm_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    Circuit c = parse_qasm(ss.str());
    c.name = path;
    return c;
}

}  // namespace limtdd
