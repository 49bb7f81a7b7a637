#include "hclab/literals.hpp"

#include <fstream>
#include <regex>
#include <sstream>
#include <utility>
#include <vector>

#include "hclab/errors.hpp"
#include "hclab/serialize.hpp"

namespace hclab {

namespace {

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidArgument("'" + path + "' is not valid JSON: " + e.what());
    }
}

double coefficient(const std::string& sign, const std::string& digits, const std::string& whole) {
    double c = 1.0;
    if (!digits.empty()) {
        if (digits == ".") throw InvalidArgument("bad coefficient in '" + whole + "'");
        c = std::stod(digits);
    }
    return sign == "-" ? -c : c;
}

std::size_t index_of(const std::string& s, const std::string& whole) {
    const auto j = std::stoul(s);
    if (j == 0) throw InvalidArgument("basis indices start at 1 in '" + whole + "'");
    return j;
}

// Splits "t1+t2-t3" into signed terms; the sign stays attached.
template <class Fn>
void for_each_term(const std::string& text, const std::regex& term, Fn fn) {
    if (text.empty()) throw InvalidArgument("empty literal");
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::smatch m;
        const std::string rest = text.substr(pos);
        if (!std::regex_search(rest, m, term, std::regex_constants::match_continuous)) {
            throw InvalidArgument("cannot parse '" + text + "' at '" + rest + "'");
        }
        if (pos > 0 && m[1].length() == 0) throw InvalidArgument("missing '+' in '" + text + "'");
        fn(m);
        pos += static_cast<std::size_t>(m.length(0));
    }
}

} // namespace

CVector parse_vector(const std::string& text) {
    if (text == "0") return CVector::Zero(1);
    static const std::regex term(R"(([+-]?)([0-9]*\.?[0-9]*)\*?e([0-9]+))");
    std::vector<std::pair<std::size_t, double>> terms;
    std::size_t dim = 1;
    for_each_term(text, term, [&](const std::smatch& m) {
        const auto j = index_of(m[3], text);
        terms.emplace_back(j, coefficient(m[1], m[2], text));
        dim = std::max(dim, j);
    });
    CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
    for (const auto& [j, c] : terms) v(static_cast<Eigen::Index>(j - 1)) += c;
    return v;
}

Ball parse_ball(const std::string& text) {
    if (!text.empty() && text[0] == '@') return ball_from_json(read_json_file(text.substr(1)));
    const auto colon = text.rfind(':');
    if (colon == std::string::npos) throw InvalidArgument("ball '" + text + "' needs the form <vector>:<radius>");
    double r = 0.0;
    try {
        std::size_t used = 0;
        r = std::stod(text.substr(colon + 1), &used);
        if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::logic_error&) {
        throw InvalidArgument("bad radius in ball '" + text + "'");
    }
    return Ball(parse_vector(text.substr(0, colon)), r);
}

CMatrix parse_matrix(const std::string& text, std::size_t min_dim) {
    CMatrix m;
    if (!text.empty() && text[0] == '@') {
        m = matrix_from_json(read_json_file(text.substr(1)));
    } else if (text == "0") {
        m = CMatrix::Zero(1, 1);
    } else {
        static const std::regex term(R"(([+-]?)([0-9]*\.?[0-9]*)\*?e([0-9]+)xe([0-9]+))");
        struct Entry {
            std::size_t row, col;
            double c;
        };
        std::vector<Entry> entries;
        std::size_t dim = 1;
        for_each_term(text, term, [&](const std::smatch& mt) {
            Entry e{index_of(mt[3], text), index_of(mt[4], text), coefficient(mt[1], mt[2], text)};
            dim = std::max({dim, e.row, e.col});
            entries.push_back(e);
        });
        m = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        for (const auto& e : entries) m(static_cast<Eigen::Index>(e.row - 1), static_cast<Eigen::Index>(e.col - 1)) += e.c;
    }
    const auto n = std::max<Eigen::Index>({m.rows(), m.cols(), static_cast<Eigen::Index>(min_dim)});
    CMatrix out = CMatrix::Zero(n, n);
    out.topLeftCorner(m.rows(), m.cols()) = m;
    return out;
}

} // namespace hclab
