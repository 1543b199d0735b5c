#pragma once

#include <cctype>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "robim/error.hpp"

namespace robim::detail {

// Minimal non-validating XML DOM covering the subset COLLADA export files
// use: elements, attributes, character data, comments, and the XML
// declaration. No entities beyond the five predefined ones, no CDATA.
struct XmlNode {
  std::string name;
  std::map<std::string, std::string> attrs;
  std::string text;  // concatenated character data
  std::vector<std::unique_ptr<XmlNode>> children;

  const XmlNode* first(std::string_view tag) const {
    for (const auto& c : children)
      if (c->name == tag) return c.get();
    return nullptr;
  }

  std::vector<const XmlNode*> all(std::string_view tag) const {
    std::vector<const XmlNode*> out;
    for (const auto& c : children)
      if (c->name == tag) out.push_back(c.get());
    return out;
  }

  std::string attr(const std::string& key, const std::string& fallback = "") const {
    auto it = attrs.find(key);
    return it == attrs.end() ? fallback : it->second;
  }
};

class XmlParser {
 public:
  explicit XmlParser(std::string_view src) : src_(src) {}

  std::unique_ptr<XmlNode> parse() {
    skip_misc();
    auto root = parse_element();
    skip_misc();
    if (pos_ != src_.size()) err("trailing content after document element");
    return root;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;

  [[noreturn]] void err(const std::string& what) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < pos_ && i < src_.size(); ++i)
      if (src_[i] == '\n') ++line;
    fail(ErrorKind::parse, "malformed XML (line " + std::to_string(line) + "): " + what);
  }

  char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }
  bool eof() const { return pos_ >= src_.size(); }

  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool consume(std::string_view s) {
    if (src_.substr(pos_, s.size()) == s) {
      pos_ += s.size();
      return true;
    }
    return false;
  }

  void skip_until(std::string_view terminator) {
    auto at = src_.find(terminator, pos_);
    if (at == std::string_view::npos) err("unterminated construct");
    pos_ = at + terminator.size();
  }

  void skip_misc() {
    for (;;) {
      skip_ws();
      if (consume("<?")) {
        skip_until("?>");
      } else if (consume("<!--")) {
        skip_until("-->");
      } else if (consume("<!")) {
        skip_until(">");
      } else {
        return;
      }
    }
  }

  std::string parse_name() {
    std::size_t start = pos_;
    while (!eof()) {
      char c = src_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
          c == ':' || c == '.') {
        ++pos_;
      } else {
        break;
      }
    }
    if (pos_ == start) err("expected name");
    return std::string(src_.substr(start, pos_ - start));
  }

  std::string decode(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] != '&') {
        out += raw[i];
        continue;
      }
      auto rest = raw.substr(i);
      if (rest.starts_with("&lt;")) out += '<', i += 3;
      else if (rest.starts_with("&gt;")) out += '>', i += 3;
      else if (rest.starts_with("&amp;")) out += '&', i += 4;
      else if (rest.starts_with("&quot;")) out += '"', i += 5;
      else if (rest.starts_with("&apos;")) out += '\'', i += 5;
      else err("unknown entity reference");
    }
    return out;
  }

  std::unique_ptr<XmlNode> parse_element() {
    if (!consume("<")) err("expected element");
    auto node = std::make_unique<XmlNode>();
    node->name = parse_name();
    for (;;) {
      skip_ws();
      if (consume("/>")) return node;
      if (consume(">")) break;
      std::string key = parse_name();
      skip_ws();
      if (!consume("=")) err("expected '=' in attribute");
      skip_ws();
      char quote = peek();
      if (quote != '"' && quote != '\'') err("expected quoted attribute value");
      ++pos_;
      auto end = src_.find(quote, pos_);
      if (end == std::string_view::npos) err("unterminated attribute value");
      node->attrs[key] = decode(src_.substr(pos_, end - pos_));
      pos_ = end + 1;
    }
    // Content.
    for (;;) {
      if (eof()) err("unterminated element <" + node->name + ">");
      if (consume("<!--")) {
        skip_until("-->");
      } else if (src_.substr(pos_, 2) == "</") {
        pos_ += 2;
        std::string closing = parse_name();
        if (closing != node->name)
          err("mismatched closing tag </" + closing + "> for <" + node->name + ">");
        skip_ws();
        if (!consume(">")) err("malformed closing tag");
        return node;
      } else if (peek() == '<') {
        node->children.push_back(parse_element());
      } else {
        std::size_t start = pos_;
        while (!eof() && peek() != '<') ++pos_;
        node->text += decode(src_.substr(start, pos_ - start));
      }
    }
  }
};

inline std::unique_ptr<XmlNode> parse_xml(std::string_view src) {
  return XmlParser(src).parse();
}

}  // namespace robim::detail
