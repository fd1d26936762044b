#include "dynsys/canonical.hpp"

#include <algorithm>
#include <stdexcept>

namespace dynsys {

namespace {

// Post-order with an explicit stack; reverse trees can be deep.
std::string encode(const std::vector<std::vector<std::uint32_t>>& children, std::uint32_t root,
                   const std::vector<bool>* cap) {
  std::vector<std::string> forms(children.size());
  struct Frame {
    std::uint32_t node;
    std::size_t next_child = 0;
  };
  std::vector<Frame> stack;
  stack.push_back({root});
  std::vector<bool> on_stack(children.size(), false);
  on_stack[root] = true;
  while (!stack.empty()) {
    Frame& f = stack.back();
    const auto& kids = children[f.node];
    if (f.next_child < kids.size()) {
      std::uint32_t child = kids[f.next_child++];
      if (on_stack[child]) throw std::invalid_argument("ahu_encode: input is not a tree");
      on_stack[child] = true;
      stack.push_back({child});
      continue;
    }
    std::vector<std::string> parts;
    parts.reserve(kids.size() + 1);
    for (std::uint32_t child : kids) parts.push_back(std::move(forms[child]));
    if (cap && (*cap)[f.node]) parts.emplace_back(kTruncatedAtom);
    std::sort(parts.begin(), parts.end());
    std::string form = "(";
    for (const std::string& p : parts) form += p;
    form += ")";
    forms[f.node] = std::move(form);
    stack.pop_back();
  }
  return forms[root];
}

}  // namespace

std::string ahu_encode(const std::vector<std::vector<std::uint32_t>>& children,
                       std::uint32_t root, const std::vector<bool>& cap_truncated) {
  return encode(children, root, &cap_truncated);
}

std::string ahu_encode(const std::vector<std::vector<std::uint32_t>>& children,
                       std::uint32_t root) {
  return encode(children, root, nullptr);
}

}  // namespace dynsys
