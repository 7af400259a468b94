/**
 * Copyright 2026, treecontrib contributors
 */
#include "treecontrib/xml.hpp"

#include <expat.h>

#include <limits>
#include <memory>

#include "treecontrib/errors.hpp"

namespace treecontrib::xml {

std::string_view Element::local_name() const {
  const auto colon = name.rfind(':');
  if (colon == std::string::npos) return name;
  return std::string_view(name).substr(colon + 1);
}

const std::string* Element::attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return &v;
  }
  return nullptr;
}

const Element* Element::first_child(std::string_view local) const {
  for (const Element& child : children) {
    if (child.local_name() == local) return &child;
  }
  return nullptr;
}

namespace {

struct ParserState {
  Element root;
  std::vector<Element*> stack;
  bool have_root = false;
};

void start_element(void* user, const XML_Char* name, const XML_Char** attrs) {
  auto* state = static_cast<ParserState*>(user);
  Element element;
  element.name = name;
  for (int i = 0; attrs[i] != nullptr; i += 2) {
    element.attributes.emplace_back(attrs[i], attrs[i + 1]);
  }
  if (state->stack.empty()) {
    state->root = std::move(element);
    state->have_root = true;
    state->stack.push_back(&state->root);
    return;
  }
  Element* parent = state->stack.back();
  parent->children.push_back(std::move(element));
  state->stack.push_back(&parent->children.back());
}

void end_element(void* user, const XML_Char* /*name*/) {
  auto* state = static_cast<ParserState*>(user);
  state->stack.pop_back();
}

void character_data(void* user, const XML_Char* data, int len) {
  auto* state = static_cast<ParserState*>(user);
  if (!state->stack.empty()) {
    state->stack.back()->text.append(data, static_cast<std::size_t>(len));
  }
}

}  // namespace

Element parse_document(std::string_view text) {
  std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(
      XML_ParserCreate(nullptr), &XML_ParserFree);
  if (!parser) throw ParseError("xml: failed to create parser");

  ParserState state;
  XML_SetUserData(parser.get(), &state);
  XML_SetElementHandler(parser.get(), start_element, end_element);
  XML_SetCharacterDataHandler(parser.get(), character_data);

  if (text.size() > static_cast<std::size_t>(std::numeric_limits<int>::max())) {
    throw ParseError("xml: document too large");
  }
  const XML_Status status =
      XML_Parse(parser.get(), text.data(), static_cast<int>(text.size()), /*isFinal=*/1);
  if (status != XML_STATUS_OK) {
    const XML_Error code = XML_GetErrorCode(parser.get());
    throw ParseError("xml: " + std::string(XML_ErrorString(code)) + " at line " +
                     std::to_string(XML_GetCurrentLineNumber(parser.get())) + ", column " +
                     std::to_string(XML_GetCurrentColumnNumber(parser.get()) + 1));
  }
  if (!state.have_root) throw ParseError("xml: document has no root element");
  return std::move(state.root);
}

namespace {

std::string escape(std::string_view raw, bool quotes) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"':
        if (quotes) {
          out += "&quot;";
        } else {
          out += c;
        }
        break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string escape_attribute(std::string_view raw) { return escape(raw, true); }
std::string escape_text(std::string_view raw) { return escape(raw, false); }

}  // namespace treecontrib::xml
