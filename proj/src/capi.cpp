#include "opcalc/opcalc.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "opcalc/berezin.hpp"
#include "opcalc/runner.hpp"

struct opc_family {
  opcalc::OperatorFamily family;
};
struct opc_quantizer {
  opcalc::Quantizer quantizer;
};
struct opc_frame {
  opcalc::Frame frame;
};

namespace {

thread_local std::string g_last_error;

opc_status status_of(opcalc::ErrorCode c) {
  using opcalc::ErrorCode;
  switch (c) {
    case ErrorCode::InvalidArgument: return OPC_ERR_INVALID_ARGUMENT;
    case ErrorCode::DimensionMismatch: return OPC_ERR_DIMENSION_MISMATCH;
    case ErrorCode::SpaceMismatch: return OPC_ERR_SPACE_MISMATCH;
    case ErrorCode::NotSquareIntegrable: return OPC_ERR_NOT_SQUARE_INTEGRABLE;
    case ErrorCode::Parse: return OPC_ERR_PARSE;
    case ErrorCode::Validation: return OPC_ERR_VALIDATION;
    case ErrorCode::CapacityExceeded: return OPC_ERR_CAPACITY;
    case ErrorCode::Internal: return OPC_ERR_INTERNAL;
  }
  return OPC_ERR_INTERNAL;
}

template <class F>
opc_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return OPC_OK;
  } catch (const opcalc::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const nlohmann::json::parse_error& e) {
    g_last_error = e.what();
    return OPC_ERR_PARSE;
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return OPC_ERR_VALIDATION;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return OPC_ERR_CAPACITY;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return OPC_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return OPC_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) opcalc::fail(opcalc::ErrorCode::InvalidArgument, std::string(what) + " is null");
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

opcalc::Vector read_interleaved(const double* data, opcalc::Index n) {
  opcalc::Vector v(n);
  for (opcalc::Index i = 0; i < n; ++i) v(i) = {data[2 * i], data[2 * i + 1]};
  return v;
}

void write_interleaved(const opcalc::Complex* src, opcalc::Index n, double* out) {
  for (opcalc::Index i = 0; i < n; ++i) {
    out[2 * i] = src[i].real();
    out[2 * i + 1] = src[i].imag();
  }
}

opcalc::Operator read_operator(const double* data, opcalc::Index d) {
  opcalc::Operator t(d, d);
  for (opcalc::Index i = 0; i < d * d; ++i) t.data()[i] = {data[2 * i], data[2 * i + 1]};
  return t;
}

}  // namespace

extern "C" {

const char* opc_last_error(void) { return g_last_error.c_str(); }

const char* opc_version(void) { return "0.1.0"; }

void opc_string_free(char* s) { std::free(s); }

opc_status opc_family_from_json(const char* backend_json, opc_family** out) {
  return guarded([&] {
    need(backend_json, "backend_json");
    need(out, "out");
    *out = nullptr;
    auto b = opcalc::build_backend(opcalc::Json::parse(backend_json));
    *out = new opc_family{std::move(b.family)};
  });
}

void opc_family_free(opc_family* fam) { delete fam; }

opc_status opc_family_info_get(const opc_family* fam, opc_family_info* out) {
  return guarded([&] {
    need(fam, "family");
    need(out, "out");
    const auto& f = fam->family;
    *out = {f.hdim(), f.points(), f.space()->total_mass(), f.tolerance(), f.exact() ? 1 : 0};
  });
}

opc_status opc_family_verify_sq(const opc_family* fam, double tol, char** report_json) {
  return guarded([&] {
    need(fam, "family");
    need(report_json, "report_json");
    opcalc::SqOptions o;
    if (tol > 0.0) o.tol = tol;
    *report_json = copy_string(opcalc::to_json(opcalc::verify_sq(fam->family, o)).dump());
  });
}

opc_status opc_quantizer_new(const opc_family* fam, opc_quantizer** out) {
  return guarded([&] {
    need(fam, "family");
    need(out, "out");
    *out = nullptr;
    *out = new opc_quantizer{opcalc::Quantizer(fam->family)};
  });
}

void opc_quantizer_free(opc_quantizer* q) { delete q; }

opc_status opc_quantizer_rank(const opc_quantizer* q, int64_t* rank) {
  return guarded([&] {
    need(q, "quantizer");
    need(rank, "rank");
    *rank = q->quantizer.b2_rank();
  });
}

opc_status opc_quantize(const opc_quantizer* q, const double* symbol, double* op_out) {
  return guarded([&] {
    need(q, "quantizer");
    need(symbol, "symbol");
    need(op_out, "op_out");
    const auto& qq = q->quantizer;
    const opcalc::Symbol f(qq.space(), read_interleaved(symbol, qq.space()->size()));
    const opcalc::Operator t = opcalc::quantize(qq, f);
    write_interleaved(t.data(), t.size(), op_out);
  });
}

opc_status opc_dequantize(const opc_quantizer* q, const double* op, double* symbol_out) {
  return guarded([&] {
    need(q, "quantizer");
    need(op, "op");
    need(symbol_out, "symbol_out");
    const auto& qq = q->quantizer;
    const opcalc::Symbol f = opcalc::dequantize(qq, read_operator(op, qq.hdim()));
    write_interleaved(f.values().data(), f.size(), symbol_out);
  });
}

opc_status opc_star(const opc_quantizer* q, const double* f, const double* g, double* symbol_out) {
  return guarded([&] {
    need(q, "quantizer");
    need(f, "f");
    need(g, "g");
    need(symbol_out, "symbol_out");
    const auto& qq = q->quantizer;
    const opcalc::Index n = qq.space()->size();
    const opcalc::Symbol h = opcalc::star(qq, opcalc::Symbol(qq.space(), read_interleaved(f, n)),
                                          opcalc::Symbol(qq.space(), read_interleaved(g, n)));
    write_interleaved(h.values().data(), n, symbol_out);
  });
}

opc_status opc_frame_new(const opc_family* fam, const double* fiducial, opc_frame** out) {
  return guarded([&] {
    need(fam, "family");
    need(fiducial, "fiducial");
    need(out, "out");
    *out = nullptr;
    *out = new opc_frame{opcalc::Frame(fam->family, read_interleaved(fiducial, fam->family.hdim()))};
  });
}

void opc_frame_free(opc_frame* fr) { delete fr; }

opc_status opc_berezin(const opc_frame* fr, const double* symbol, double* op_out) {
  return guarded([&] {
    need(fr, "frame");
    need(symbol, "symbol");
    need(op_out, "op_out");
    const auto& frame = fr->frame;
    const opcalc::Symbol f(frame.space(), read_interleaved(symbol, frame.space()->size()));
    const opcalc::Operator t = opcalc::berezin_op(frame, f);
    write_interleaved(t.data(), t.size(), op_out);
  });
}

opc_status opc_describe_json(const char* backend_json, char** out_json) {
  return guarded([&] {
    need(backend_json, "backend_json");
    need(out_json, "out_json");
    *out_json = copy_string(opcalc::dump_report(opcalc::describe_backend(opcalc::Json::parse(backend_json))));
  });
}

opc_status opc_run_json(const char* config_json, const opc_run_options* options, char** report_json,
                        int* exit_code) {
  return guarded([&] {
    need(config_json, "config_json");
    need(report_json, "report_json");
    need(exit_code, "exit_code");
    opcalc::RunOptions o;
    if (options) {
      if (options->has_seed) o.seed = options->seed;
      if (options->has_tol) o.tol = options->tol;
      o.timings = options->timings != 0;
    }
    const auto outcome = opcalc::run_config(config_json, o);
    *report_json = copy_string(opcalc::dump_report(outcome.report));
    *exit_code = outcome.exit_code;
  });
}

opc_status opc_render_table(const char* report_json, char** out_text) {
  return guarded([&] {
    need(report_json, "report_json");
    need(out_text, "out_text");
    *out_text = copy_string(opcalc::render_table(opcalc::Json::parse(report_json)));
  });
}

}  // extern "C"
