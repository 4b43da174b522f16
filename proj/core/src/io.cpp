#include "isoslope/io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace isoslope {

namespace {

struct Lexer {
    const std::string& s;
    size_t pos = 0;
    int line;

    explicit Lexer(const std::string& text, int line_no) : s(text), line(line_no) {}

    void skip() {
        while (pos < s.size() && std::isspace((unsigned char)s[pos])) ++pos;
    }
    bool eof() {
        skip();
        return pos >= s.size();
    }
    char peek() {
        skip();
        return pos < s.size() ? s[pos] : '\0';
    }
    char get() {
        skip();
        return s[pos++];
    }
    [[noreturn]] void fail(const std::string& msg) {
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(line) + ", col " + std::to_string(pos + 1) + ": " + msg);
    }
    long long integer() {
        skip();
        bool neg = false;
        if (peek() == '-' || peek() == '+') neg = get() == '-';
        if (!std::isdigit((unsigned char)peek())) fail("expected an integer");
        long long v = 0;
        while (pos < s.size() && std::isdigit((unsigned char)s[pos])) v = v * 10 + (s[pos++] - '0');
        return neg ? -v : v;
    }
    bool match_word(const char* w) {
        skip();
        size_t len = std::char_traits<char>::length(w);
        if (s.compare(pos, len, w) != 0) return false;
        // must not be a prefix of a longer identifier
        size_t end = pos + len;
        if (end < s.size() && std::isalnum((unsigned char)s[end])) return false;
        pos = end;
        return true;
    }
};

class SeriesParser {
public:
    SeriesParser(Lexer& lx, const PrecisionProfile& prof, RingClaim claim)
        : lx_(lx), prof_(prof), claim_(claim) {}

    Series expr() {
        Series acc = term();
        while (!lx_.eof()) {
            char c = lx_.peek();
            if (c == '+') {
                lx_.get();
                acc = acc + term();
            } else if (c == '-') {
                lx_.get();
                acc = acc - term();
            } else {
                break;
            }
        }
        return acc;
    }

private:
    Series term() {
        Series acc = factor();
        while (!lx_.eof() && lx_.peek() == '*') {
            lx_.get();
            acc = acc * factor();
        }
        return acc;
    }

    Rat exponent() {
        if (lx_.peek() == '(') {
            lx_.get();
            long long a = lx_.integer();
            long long b = 1;
            if (lx_.peek() == '/') {
                lx_.get();
                b = lx_.integer();
            }
            if (lx_.peek() != ')') lx_.fail("expected ')' closing the exponent");
            lx_.get();
            return Rat(a, b);
        }
        return Rat(lx_.integer());
    }

    Series factor() {
        char c = lx_.peek();
        if (c == '(') {
            lx_.get();
            Series inner = expr();
            if (lx_.peek() != ')') lx_.fail("expected ')'");
            lx_.get();
            return inner;
        }
        if (c == '-') {
            lx_.get();
            return -factor();
        }
        if (std::isdigit((unsigned char)c)) {
            long long v = lx_.integer();
            return Series::constant(prof_, Coeff(prof_.ring, v), claim_);
        }
        if (lx_.match_word("pi")) {
            int k = 1;
            if (lx_.peek() == '^') {
                lx_.get();
                Rat r = exponent();
                if (!r.is_integer() || r < Rat(0)) lx_.fail("pi exponent must be a nonnegative integer");
                k = (int)r.num;
            }
            return Series::constant(prof_, Coeff::pi_pow(prof_.ring, k), claim_);
        }
        if (lx_.match_word("p")) {
            return Series::constant(prof_, Coeff(prof_.ring, prof_.ring.p), claim_);
        }
        if (lx_.match_word("t")) {
            Rat e(1);
            if (lx_.peek() == '^') {
                lx_.get();
                e = exponent();
            }
            try {
                return Series::monomial(prof_, e, Coeff::one(prof_.ring));
            } catch (const Error& err) {
                if (err.code() == ErrorCode::ExponentLevelExceeded)
                    throw Error(ErrorCode::InvariantViolation,
                                "line " + std::to_string(lx_.line) + ": exponent t^(" + e.str() +
                                    ") is outside the p^-K lattice");
                throw;
            }
        }
        lx_.fail("expected a factor (integer, p, pi, t, or parenthesized expression)");
    }

    Lexer& lx_;
    const PrecisionProfile& prof_;
    RingClaim claim_;
};

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : s) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

Rat parse_rat(const std::string& s, int line) {
    Lexer lx(s, line);
    long long a = lx.integer();
    long long b = 1;
    if (!lx.eof() && lx.peek() == '/') {
        lx.get();
        b = lx.integer();
    }
    if (!lx.eof()) lx.fail("trailing characters after rational");
    return Rat(a, b);
}

} // namespace

Series parse_series_literal(const std::string& text, const PrecisionProfile& prof, RingClaim claim) {
    Lexer lx(text, 0);
    if (lx.eof()) throw Error(ErrorCode::ParseError, "empty series literal");
    SeriesParser sp(lx, prof, claim);
    Series out = sp.expr();
    if (!lx.eof()) lx.fail("trailing characters after series literal");
    out.set_claim(claim);
    return out;
}

FModule CrystalFile::to_module() const {
    FModule m;
    m.rank = rank;
    m.A = matrix;
    m.claim = claim;
    m.twist = twist;
    m.validate();
    return m;
}

CrystalFile parse_crystal(const std::string& bytes) {
    CrystalFile cf;
    std::istringstream in(bytes);
    std::string raw;
    int line_no = 0;

    std::map<std::string, std::string> header;
    std::vector<std::pair<int, std::string>> matrix_lines, nabla_lines, vector_lines;
    enum class Block { header, matrix, nabla, vec, expected } block = Block::header;

    while (std::getline(in, raw)) {
        ++line_no;
        std::string s = trim(raw);
        if (s.empty() || s[0] == '#') continue;
        if (s == "matrix:") { block = Block::matrix; continue; }
        if (s == "nabla:") { block = Block::nabla; continue; }
        if (s == "vector:") { block = Block::vec; continue; }
        if (s == "expected:") { block = Block::expected; continue; }
        if (block == Block::matrix) { matrix_lines.emplace_back(line_no, s); continue; }
        if (block == Block::nabla) { nabla_lines.emplace_back(line_no, s); continue; }
        if (block == Block::vec) { vector_lines.emplace_back(line_no, s); continue; }
        size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::ParseError,
                        "line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(s.substr(0, eq)), val = trim(s.substr(eq + 1));
        if (block == Block::expected)
            cf.expected[key] = val;
        else
            header[key] = val;
    }

    auto need = [&](const char* k) -> const std::string& {
        auto it = header.find(k);
        if (it == header.end())
            throw Error(ErrorCode::ParseError, std::string("missing header key ") + k);
        return it->second;
    };
    auto get_int = [&](const char* k) { return (int)parse_rat(need(k), 0).num; };

    cf.prof.ring.p = get_int("p");
    cf.prof.ring.e = get_int("e");
    cf.prof.ring.N = get_int("N");
    cf.prof.K = get_int("K");
    if (header.count("t_lo")) cf.prof.t_lo = parse_rat(header["t_lo"], 0);
    if (header.count("t_hi")) cf.prof.t_hi = parse_rat(header["t_hi"], 0);
    cf.prof.validate();
    cf.rank = get_int("rank");
    if (cf.rank < 1)
        throw Error(ErrorCode::ParseError, "rank must be >= 1");
    cf.claim = ring_claim_from_name(need("ring_claim"));
    cf.twist = header.count("twist") ? (int)parse_rat(header["twist"], 0).num : 0;
    if (header.count("lambda")) {
        Series ls = parse_series_literal(header["lambda"], cf.prof, RingClaim::omega);
        for (const auto& [e, c] : ls.monomials())
            if (e != Rat(0))
                throw Error(ErrorCode::ParseError, "lambda must be a constant");
        cf.lambda = ls.part_constant();
    }

    auto parse_rows = [&](const std::vector<std::pair<int, std::string>>& lines, const char* what) {
        if ((int)lines.size() != cf.rank)
            throw Error(ErrorCode::ParseError,
                        std::string(what) + " block has " + std::to_string(lines.size()) +
                            " rows, rank is " + std::to_string(cf.rank));
        SeriesMat m;
        for (const auto& [ln, text] : lines) {
            auto cells = split_commas(text);
            if ((int)cells.size() != cf.rank)
                throw Error(ErrorCode::ParseError,
                            "line " + std::to_string(ln) + ": expected " + std::to_string(cf.rank) +
                                " entries");
            std::vector<Series> row;
            for (const auto& cell : cells)
                row.push_back(parse_series_literal(trim(cell), cf.prof, cf.claim));
            m.push_back(std::move(row));
        }
        return m;
    };

    if (matrix_lines.empty())
        throw Error(ErrorCode::ParseError, "missing matrix: block");
    cf.matrix = parse_rows(matrix_lines, "matrix");
    if (!nabla_lines.empty()) cf.nabla = parse_rows(nabla_lines, "nabla");
    if (!vector_lines.empty()) {
        if (vector_lines.size() != 1)
            throw Error(ErrorCode::ParseError, "vector: block must be a single row");
        auto cells = split_commas(vector_lines[0].second);
        if ((int)cells.size() != cf.rank)
            throw Error(ErrorCode::ParseError, "vector: row length must equal rank");
        SeriesVec v;
        for (const auto& cell : cells)
            v.push_back(parse_series_literal(trim(cell), cf.prof, RingClaim::gamma));
        cf.vec = v;
    }

    cf.to_module(); // runs FModule invariants (e.g. omega support check)
    return cf;
}

CrystalFile load_crystal(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw Error(ErrorCode::ParseError, "cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_crystal(ss.str());
}

std::string CrystalFile::canonical() const {
    std::ostringstream out;
    out << "p = " << prof.ring.p << "\n";
    out << "e = " << prof.ring.e << "\n";
    out << "N = " << prof.ring.N << "\n";
    out << "K = " << prof.K << "\n";
    out << "t_lo = " << prof.t_lo.str() << "\n";
    out << "t_hi = " << prof.t_hi.str() << "\n";
    out << "rank = " << rank << "\n";
    out << "ring_claim = " << ring_claim_name(claim) << "\n";
    out << "twist = " << twist << "\n";
    if (lambda) out << "lambda = " << lambda->str() << "\n";
    auto emit_rows = [&](const SeriesMat& m) {
        for (const auto& row : m) {
            for (size_t j = 0; j < row.size(); ++j) {
                if (j) out << ", ";
                out << row[j].str();
            }
            out << "\n";
        }
    };
    out << "matrix:\n";
    emit_rows(matrix);
    if (nabla) {
        out << "nabla:\n";
        emit_rows(*nabla);
    }
    if (vec) {
        out << "vector:\n";
        for (size_t j = 0; j < vec->size(); ++j) {
            if (j) out << ", ";
            out << (*vec)[j].str();
        }
        out << "\n";
    }
    if (!expected.empty()) {
        out << "expected:\n";
        for (const auto& [k, v] : expected) out << k << " = " << v << "\n";
    }
    return out.str();
}

} // namespace isoslope
