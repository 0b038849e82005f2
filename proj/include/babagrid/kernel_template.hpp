#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "babagrid/dynamics.hpp"
#include "babagrid/rules.hpp"

namespace babagrid {

// Kernel source with {name} placeholders; "{{" and "}}" are literal braces.
class KernelTemplate {
 public:
  explicit KernelTemplate(std::string text);

  // The Python kernel dialect served by kernel endpoints.
  static const KernelTemplate& reference();
  static KernelTemplate from_file(const std::filesystem::path& path);

  const std::string& text() const noexcept { return text_; }
  std::vector<std::string> placeholders() const;

  // Throws TemplateRenderError for an unknown placeholder or a stray brace.
  std::string render(const std::map<std::string, std::string>& bindings) const;

 private:
  std::string text_;
};

// {'a', 'b'} in ascending order; set() when empty.
std::string python_set_literal(const CharSet& chars);

// Placeholder values for one rule set: you_chars ... shut_chars,
// dangerous_text_chars, unlock.
std::map<std::string, std::string> kernel_bindings(const StepSets& sets);

std::string render_kernel(const KernelTemplate& tmpl, const RuleSet& rules, const DynamicsConfig& cfg = {});

}  // namespace babagrid
