/**
 * Copyright 2026, treecontrib contributors
 */
#ifndef TREECONTRIB_XML_HPP_
#define TREECONTRIB_XML_HPP_

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace treecontrib::xml {

/// Element tree produced by parse_document. Attribute order is document order.
struct Element {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Element> children;
  std::string text;  // concatenated character data

  // Name with any namespace prefix stripped ("pmml:Node" -> "Node").
  std::string_view local_name() const;
  const std::string* attribute(std::string_view key) const;
  const Element* first_child(std::string_view local) const;
};

// Parses a whole document and returns its root element.
// Throws ParseError with line/column context on malformed input.
Element parse_document(std::string_view text);

std::string escape_attribute(std::string_view raw);
std::string escape_text(std::string_view raw);

}  // namespace treecontrib::xml

#endif  // TREECONTRIB_XML_HPP_
