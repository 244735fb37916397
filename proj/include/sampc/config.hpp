// Copyright 2026 The sampc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Config reflection.
//
// A config is a plain struct with a `reflect` member template that names its
// fields:
//
//   struct MyConfig {
//     int count = 3;
//     double gain = 0.5;
//     template <class V> void reflect(V& v) {
//       v.field("count", count);
//       v.field("gain", gain, Slider{0.0, 2.0, 0.01});
//     }
//   };
//
// Supported field kinds map to GUI widgets: int -> int-slider,
// double -> float-slider, bool -> checkbox, Choice -> dropdown,
// ArrayField -> array-folder with one sub-slider per entry. An optional
// `void validate() const` is run after every mutation.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <typeindex>
#include <typeinfo>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sampc/error.hpp"

namespace sampc {

using json = nlohmann::json;

// Explicit slider limits for an int or double field.
struct Slider {
  double min = 0.0;
  double max = 1.0;
  double step = 0.01;
};

// Enumerated string value (a dropdown).
struct Choice {
  std::vector<std::string> options;
  std::string value;

  bool operator==(const Choice&) const = default;
};

// Fixed-size real array with per-entry slider metadata.
struct ArrayField {
  std::vector<double> values;
  std::vector<std::string> names;
  std::vector<double> mins;
  std::vector<double> maxs;
  std::vector<double> steps;

  bool operator==(const ArrayField&) const = default;
};

enum class WidgetKind { kIntSlider, kFloatSlider, kCheckbox, kDropdown, kArrayFolder };

inline std::string_view to_string(WidgetKind kind) {
  switch (kind) {
    case WidgetKind::kIntSlider:
      return "int-slider";
    case WidgetKind::kFloatSlider:
      return "float-slider";
    case WidgetKind::kCheckbox:
      return "checkbox";
    case WidgetKind::kDropdown:
      return "dropdown";
    case WidgetKind::kArrayFolder:
      return "array-folder";
  }
  return "float-slider";
}

struct FieldSchema {
  std::string name;
  WidgetKind kind = WidgetKind::kFloatSlider;
  json default_value;  // the reference (registered) default
  json value;          // the current value
  double min = 0.0;
  double max = 0.0;
  double step = 0.0;
  std::vector<std::string> options;
  std::vector<FieldSchema> subfields;

  bool operator==(const FieldSchema& other) const {
    return name == other.name && kind == other.kind &&
           default_value == other.default_value && value == other.value &&
           min == other.min && max == other.max && step == other.step &&
           options == other.options && subfields == other.subfields;
  }
};

struct ConfigSchema {
  std::vector<FieldSchema> fields;

  bool operator==(const ConfigSchema&) const = default;

  const FieldSchema* find(std::string_view name) const {
    for (const FieldSchema& f : fields) {
      if (f.name == name) return &f;
    }
    return nullptr;
  }
};

inline json to_json(const FieldSchema& f) {
  json j = {{"name", f.name}, {"kind", to_string(f.kind)},
            {"default", f.default_value}, {"value", f.value}};
  switch (f.kind) {
    case WidgetKind::kIntSlider:
    case WidgetKind::kFloatSlider:
      j["min"] = f.min;
      j["max"] = f.max;
      j["step"] = f.step;
      break;
    case WidgetKind::kDropdown:
      j["options"] = f.options;
      break;
    case WidgetKind::kArrayFolder: {
      json subs = json::array();
      for (const FieldSchema& s : f.subfields) subs.push_back(to_json(s));
      j["subfields"] = std::move(subs);
      break;
    }
    case WidgetKind::kCheckbox:
      break;
  }
  return j;
}

inline json to_json(const ConfigSchema& schema) {
  json fields = json::array();
  for (const FieldSchema& f : schema.fields) fields.push_back(to_json(f));
  return fields;
}

// Default slider range: [0, 4|d|] ([-4|d|, 0] for negative d, [0, 1] for
// d == 0) in 100 steps. Integer sliders use a whole-number step of at least 1.
inline Slider default_slider(double d, bool integral) {
  Slider s;
  if (d > 0.0) {
    s = {0.0, 4.0 * d, 0.0};
  } else if (d < 0.0) {
    s = {4.0 * d, 0.0, 0.0};
  } else {
    s = {0.0, 1.0, 0.0};
  }
  s.step = (s.max - s.min) / 100.0;
  if (integral) {
    s.max = std::max(s.max, s.min + 1.0);
    s.step = std::max(1.0, std::floor((s.max - s.min) / 100.0));
  }
  return s;
}

namespace detail {

template <class T>
concept HasValidate = requires(const T& t) { t.validate(); };

// Collects the JSON value of every field.
class JsonWriter {
 public:
  template <class T>
  void field(std::string_view name, const T& value, std::optional<Slider> = {}) {
    out_[std::string(name)] = encode(value);
  }
  json take() { return std::move(out_); }

  static json encode(int v) { return v; }
  static json encode(double v) { return v; }
  static json encode(bool v) { return v; }
  static json encode(const Choice& c) { return c.value; }
  static json encode(const ArrayField& a) { return a.values; }

 private:
  json out_ = json::object();
};

// Builds the widget schema; bounds come from a reference instance so they
// stay fixed while the live values change.
class SchemaBuilder {
 public:
  explicit SchemaBuilder(json reference) : reference_(std::move(reference)) {}

  void field(std::string_view name, const int& value,
             std::optional<Slider> slider = {}) {
    const json& ref = reference_.at(std::string(name));
    const Slider s = slider ? *slider : default_slider(ref.get<int>(), true);
    schema_.fields.push_back({std::string(name), WidgetKind::kIntSlider, ref,
                              json(value), s.min, s.max, s.step, {}, {}});
  }
  void field(std::string_view name, const double& value,
             std::optional<Slider> slider = {}) {
    const json& ref = reference_.at(std::string(name));
    const Slider s =
        slider ? *slider : default_slider(ref.get<double>(), false);
    schema_.fields.push_back({std::string(name), WidgetKind::kFloatSlider, ref,
                              json(value), s.min, s.max, s.step, {}, {}});
  }
  void field(std::string_view name, const bool& value,
             std::optional<Slider> = {}) {
    schema_.fields.push_back({std::string(name), WidgetKind::kCheckbox,
                              reference_.at(std::string(name)), json(value), 0.0,
                              0.0, 0.0, {}, {}});
  }
  void field(std::string_view name, const Choice& value,
             std::optional<Slider> = {}) {
    if (value.options.empty()) {
      throw ConfigError("dropdown field '" + std::string(name) +
                        "' has no options");
    }
    schema_.fields.push_back({std::string(name), WidgetKind::kDropdown,
                              reference_.at(std::string(name)),
                              json(value.value), 0.0, 0.0, 0.0, value.options,
                              {}});
  }
  void field(std::string_view name, const ArrayField& value,
             std::optional<Slider> = {}) {
    const json& ref = reference_.at(std::string(name));
    FieldSchema folder{std::string(name), WidgetKind::kArrayFolder, ref,
                       json(value.values), 0.0, 0.0, 0.0, {}, {}};
    for (std::size_t i = 0; i < value.values.size(); ++i) {
      const double d = ref.at(i).get<double>();
      Slider s = default_slider(d, false);
      if (i < value.mins.size()) s.min = value.mins[i];
      if (i < value.maxs.size()) s.max = value.maxs[i];
      if (i < value.steps.size()) s.step = value.steps[i];
      const std::string sub_name =
          i < value.names.size() ? value.names[i] : std::to_string(i);
      folder.subfields.push_back({sub_name, WidgetKind::kFloatSlider, json(d),
                                  json(value.values[i]), s.min, s.max, s.step,
                                  {}, {}});
    }
    schema_.fields.push_back(std::move(folder));
  }
  template <class T>
  void field(std::string_view name, const T&, std::optional<Slider> = {}) {
    throw ConfigError("field '" + std::string(name) +
                      "' has an unsupported kind");
  }

  ConfigSchema take() { return std::move(schema_); }

 private:
  json reference_;
  ConfigSchema schema_;
};

// Assigns one field addressed by a dotted path ("sigma", "arr.field1",
// "arr.0").
class FieldSetter {
 public:
  FieldSetter(std::string_view path, const json& value) : value_(value) {
    const auto dot = path.find('.');
    head_ = std::string(path.substr(0, dot));
    if (dot != std::string_view::npos) tail_ = std::string(path.substr(dot + 1));
  }

  template <class T>
  void field(std::string_view name, T& target, std::optional<Slider> = {}) {
    if (name != head_) return;
    found_ = true;
    assign(target);
  }

  bool found() const { return found_; }

 private:
  [[noreturn]] void mismatch(std::string_view expected) const {
    throw ConfigError("type mismatch for field '" + head_ + "': expected " +
                      std::string(expected) + ", got " + value_.dump());
  }
  void no_subpath() const {
    if (!tail_.empty()) {
      throw ConfigError("field '" + head_ + "' has no sub-field '" + tail_ +
                        "'");
    }
  }

  void assign(int& target) const {
    no_subpath();
    if (value_.is_number_integer()) {
      target = value_.get<int>();
    } else if (value_.is_number_float() &&
               value_.get<double>() == std::floor(value_.get<double>())) {
      target = static_cast<int>(value_.get<double>());
    } else {
      mismatch("int");
    }
  }
  void assign(double& target) const {
    no_subpath();
    if (!value_.is_number()) mismatch("number");
    target = value_.get<double>();
  }
  void assign(bool& target) const {
    no_subpath();
    if (!value_.is_boolean()) mismatch("bool");
    target = value_.get<bool>();
  }
  void assign(Choice& target) const {
    no_subpath();
    if (!value_.is_string()) mismatch("string");
    const auto s = value_.get<std::string>();
    if (std::find(target.options.begin(), target.options.end(), s) ==
        target.options.end()) {
      throw ConfigError("value '" + s + "' is not an option of field '" +
                        head_ + "'");
    }
    target.value = s;
  }
  void assign(ArrayField& target) const {
    if (tail_.empty()) {
      if (!value_.is_array() || value_.size() != target.values.size()) {
        mismatch("array of " + std::to_string(target.values.size()) +
                 " numbers");
      }
      std::vector<double> values;
      for (const json& e : value_) {
        if (!e.is_number()) mismatch("array of numbers");
        values.push_back(e.get<double>());
      }
      target.values = std::move(values);
      return;
    }
    if (!value_.is_number()) mismatch("number");
    std::size_t index = target.values.size();
    for (std::size_t i = 0; i < target.names.size(); ++i) {
      if (target.names[i] == tail_) index = i;
    }
    if (index == target.values.size() && !tail_.empty() &&
        std::all_of(tail_.begin(), tail_.end(),
                    [](char c) { return c >= '0' && c <= '9'; })) {
      index = std::stoul(tail_);
    }
    if (index >= target.values.size()) {
      throw ConfigError("field '" + head_ + "' has no entry '" + tail_ + "'");
    }
    target.values[index] = value_.get<double>();
  }
  template <class T>
  void assign(T&) const {
    throw ConfigError("field '" + head_ + "' has an unsupported kind");
  }

  const json& value_;
  std::string head_;
  std::string tail_;
  bool found_ = false;
};

class FieldNames {
 public:
  template <class T>
  void field(std::string_view name, const T&, std::optional<Slider> = {}) {
    names.emplace_back(name);
  }
  std::vector<std::string> names;
};

}  // namespace detail

template <class Config>
json config_to_json(Config config) {
  detail::JsonWriter writer;
  config.reflect(writer);
  return writer.take();
}

// Widget schema for `config`, with slider bounds derived from `reference`
// (normally the registered default).
template <class Config>
ConfigSchema schema_of(Config config, const Config& reference) {
  detail::SchemaBuilder builder(config_to_json(reference));
  config.reflect(builder);
  return builder.take();
}

template <class Config>
ConfigSchema schema_of(const Config& config) {
  return schema_of(config, config);
}

template <class Config>
std::vector<std::string> field_names(Config config) {
  detail::FieldNames names;
  config.reflect(names);
  return std::move(names.names);
}

// Sets the field at `path`; the config is left untouched if the assignment
// or validation fails.
template <class Config>
void set_field(Config& config, std::string_view path, const json& value) {
  Config candidate = config;
  detail::FieldSetter setter(path, value);
  candidate.reflect(setter);
  if (!setter.found()) {
    throw ConfigError("unknown config field '" + std::string(path) + "'");
  }
  if constexpr (detail::HasValidate<Config>) candidate.validate();
  config = std::move(candidate);
}

// Type-erased config value with value semantics.
class AnyConfig {
 public:
  AnyConfig() = default;

  template <class Config>
    requires(!std::is_same_v<std::decay_t<Config>, AnyConfig>)
  AnyConfig(Config config)  // NOLINT(google-explicit-constructor)
      : impl_(std::make_unique<Model<Config>>(std::move(config))) {}

  AnyConfig(const AnyConfig& other)
      : impl_(other.impl_ ? other.impl_->clone() : nullptr) {}
  AnyConfig(AnyConfig&&) noexcept = default;
  AnyConfig& operator=(const AnyConfig& other) {
    if (this != &other) impl_ = other.impl_ ? other.impl_->clone() : nullptr;
    return *this;
  }
  AnyConfig& operator=(AnyConfig&&) noexcept = default;

  bool has_value() const { return impl_ != nullptr; }
  std::type_index type() const {
    return impl_ ? impl_->type() : std::type_index(typeid(void));
  }

  json to_json() const { return checked().to_json(); }
  ConfigSchema schema() const { return checked().schema(nullptr); }
  ConfigSchema schema(const AnyConfig& reference) const {
    if (reference.type() != type()) {
      throw ConfigError("schema reference has a different config type");
    }
    return checked().schema(reference.impl_.get());
  }
  std::vector<std::string> fields() const { return checked().fields(); }
  void set(std::string_view path, const json& value) {
    checked().set(path, value);
  }

  template <class Config>
  const Config& as() const {
    if (type() != std::type_index(typeid(Config))) {
      throw ConfigError(std::string("config is not of type ") +
                        typeid(Config).name());
    }
    return static_cast<const Model<Config>&>(*impl_).value;
  }
  template <class Config>
  Config& as() {
    return const_cast<Config&>(std::as_const(*this).as<Config>());
  }

  friend bool operator==(const AnyConfig& a, const AnyConfig& b) {
    if (a.type() != b.type()) return false;
    if (!a.impl_) return true;
    return a.to_json() == b.to_json();
  }

 private:
  struct Concept {
    virtual ~Concept() = default;
    virtual std::unique_ptr<Concept> clone() const = 0;
    virtual std::type_index type() const = 0;
    virtual json to_json() const = 0;
    virtual ConfigSchema schema(const Concept* reference) const = 0;
    virtual std::vector<std::string> fields() const = 0;
    virtual void set(std::string_view path, const json& value) = 0;
  };

  template <class Config>
  struct Model final : Concept {
    explicit Model(Config v) : value(std::move(v)) {}
    std::unique_ptr<Concept> clone() const override {
      return std::make_unique<Model>(value);
    }
    std::type_index type() const override { return typeid(Config); }
    json to_json() const override { return config_to_json(value); }
    ConfigSchema schema(const Concept* reference) const override {
      if (reference == nullptr) return schema_of(value);
      return schema_of(value, static_cast<const Model&>(*reference).value);
    }
    std::vector<std::string> fields() const override {
      return field_names(value);
    }
    void set(std::string_view path, const json& v) override {
      set_field(value, path, v);
    }
    Config value;
  };

  Concept& checked() const {
    if (!impl_) throw ConfigError("empty config");
    return *impl_;
  }

  std::unique_ptr<Concept> impl_;
};

}  // namespace sampc
