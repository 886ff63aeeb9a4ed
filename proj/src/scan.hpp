#pragma once
// Internal character scanner shared by the schema, query, and network-file
// parsers. Tracks line/column and treats '#' as a to-end-of-line comment.

#include <cctype>
#include <string>
#include <string_view>

#include "dcmd/errors.hpp"

namespace dcmd::detail {

class Scanner {
public:
    explicit Scanner(std::string_view text) : text_(text) {}

    int line() const { return line_; }
    int column() const { return col_; }
    size_t offset() const { return pos_; }

    bool at_end() {
        skip_ws_comments();
        return pos_ >= text_.size();
    }

    char peek() {
        skip_ws_comments();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    bool try_symbol(char c) {
        skip_ws_comments();
        if (pos_ < text_.size() && text_[pos_] == c) {
            advance();
            return true;
        }
        return false;
    }

    void expect_symbol(char c, const std::string& context) {
        if (!try_symbol(c))
            throw ParseError("unexpected " + describe_here() + " in " + context, line_, col_,
                             std::string("'") + c + "'");
    }

    // Identifier: [A-Za-z_][A-Za-z0-9_]*
    bool try_ident(std::string& out) {
        skip_ws_comments();
        if (pos_ >= text_.size()) return false;
        char c = text_[pos_];
        if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) return false;
        out.clear();
        while (pos_ < text_.size()) {
            c = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
                out.push_back(c);
                advance();
            } else {
                break;
            }
        }
        return true;
    }

    std::string expect_ident(const std::string& context) {
        std::string s;
        if (!try_ident(s))
            throw ParseError("unexpected " + describe_here() + " in " + context, line_, col_,
                             "identifier");
        return s;
    }

    void expect_keyword(const std::string& kw, const std::string& context) {
        int l = line_, c = col_;
        std::string s;
        if (!try_ident(s) || s != kw)
            throw ParseError("unexpected token '" + s + "' in " + context, l, c, "'" + kw + "'");
    }

    bool try_number(double& out) {
        skip_ws_comments();
        size_t p = pos_;
        if (p < text_.size() && (text_[p] == '-' || text_[p] == '+')) ++p;
        size_t digits_start = p;
        while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) ++p;
        if (p == digits_start) return false;
        if (p < text_.size() && text_[p] == '.') {
            ++p;
            while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) ++p;
        }
        if (p < text_.size() && (text_[p] == 'e' || text_[p] == 'E')) {
            size_t q = p + 1;
            if (q < text_.size() && (text_[q] == '-' || text_[q] == '+')) ++q;
            size_t exp_start = q;
            while (q < text_.size() && std::isdigit(static_cast<unsigned char>(text_[q]))) ++q;
            if (q > exp_start) p = q;
        }
        out = std::stod(std::string(text_.substr(pos_, p - pos_)));
        while (pos_ < p) advance();
        return true;
    }

    double expect_number(const std::string& context) {
        double d;
        if (!try_number(d))
            throw ParseError("unexpected " + describe_here() + " in " + context, line_, col_,
                             "number");
        return d;
    }

    // Double-quoted string with \" \\ \n \t escapes.
    bool try_string(std::string& out) {
        skip_ws_comments();
        if (pos_ >= text_.size() || text_[pos_] != '"') return false;
        advance();
        out.clear();
        while (pos_ < text_.size() && text_[pos_] != '"') {
            char c = text_[pos_];
            if (c == '\\') {
                advance();
                if (pos_ >= text_.size())
                    throw ParseError("unterminated string escape", line_, col_);
                char e = text_[pos_];
                switch (e) {
                    case 'n': out.push_back('\n'); break;
                    case 't': out.push_back('\t'); break;
                    case '"': out.push_back('"'); break;
                    case '\\': out.push_back('\\'); break;
                    default:
                        throw ParseError(std::string("bad escape '\\") + e + "'", line_, col_);
                }
                advance();
            } else {
                out.push_back(c);
                advance();
            }
        }
        if (pos_ >= text_.size()) throw ParseError("unterminated string literal", line_, col_);
        advance();  // closing quote
        return true;
    }

    std::string describe_here() {
        skip_ws_comments();
        if (pos_ >= text_.size()) return "end of input";
        char c = text_[pos_];
        if (std::isprint(static_cast<unsigned char>(c)))
            return std::string("'") + c + "'";
        return "byte 0x" + byte_hex(c);
    }

private:
    static std::string byte_hex(char c) {
        static const char* hex = "0123456789abcdef";
        unsigned char u = static_cast<unsigned char>(c);
        return std::string{hex[u >> 4], hex[u & 0xf]};
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_ws_comments() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    std::string_view text_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace dcmd::detail
