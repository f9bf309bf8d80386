#pragma once

#include <stdexcept>
#include <string>

namespace typeprobe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Registry or manifest could not be loaded.
class LoadError : public Error {
 public:
  using Error::Error;
};

/// Text could not be shaped or rasterized.
class RenderError : public Error {
 public:
  using Error::Error;
};

/// Dataset or question generation failed (unsatisfiable quota, empty corpus...).
class GenerationError : public Error {
 public:
  using Error::Error;
};

/// Bad user configuration: flags, config files, environment.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace typeprobe
