#include "ghosteval/http_server.h"

#include "ghosteval/error.h"
#include "httplib.h"
#include "json.hpp"

namespace ghosteval {

namespace {

using nlohmann::ordered_json;

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kAuth: return 401;
    case ErrorKind::kForbidden: return 403;
    case ErrorKind::kNotFound: return 404;
    case ErrorKind::kValidation:
    case ErrorKind::kIncompleteAnnotation: return 422;
    case ErrorKind::kInternal: return 500;
    default: return 400;
  }
}

void send_json(httplib::Response& res, int status, const std::string& body) {
  res.status = status;
  res.set_header("Cache-Control", "no-store");
  res.set_content(body, "application/json");
}

void send_error(httplib::Response& res, ErrorKind kind, const std::string& message,
                const std::vector<std::size_t>* lines = nullptr) {
  ordered_json err;
  err["kind"] = error_kind_name(kind);
  err["message"] = message;
  if (lines != nullptr) err["lines"] = *lines;
  send_json(res, status_for(kind), ordered_json{{"error", err}}.dump());
}

std::string token_of(const httplib::Request& req, const char* param) {
  const auto auth = req.get_header_value("Authorization");
  constexpr std::string_view kBearer = "Bearer ";
  if (auth.size() > kBearer.size() && auth.compare(0, kBearer.size(), kBearer) == 0) {
    return auth.substr(kBearer.size());
  }
  return req.get_param_value(param);
}

template <typename F>
httplib::Server::Handler guarded(F body) {
  return [body](const httplib::Request& req, httplib::Response& res) {
    try {
      body(req, res);
    } catch (const MissingLinesError& e) {
      send_error(res, e.kind(), e.what(), &e.lines());
    } catch (const Error& e) {
      send_error(res, e.kind(), e.what());
    } catch (const std::exception& e) {
      send_error(res, ErrorKind::kInternal, e.what());
    }
  };
}

}  // namespace

struct HttpServer::Impl {
  AnnotationService& service;
  HttpOptions options;
  httplib::Server server;
  bool bound = false;
  int port = 0;

  Impl(AnnotationService& s, HttpOptions o) : service(s), options(std::move(o)) {
    server.Get("/api/task", guarded([this](const httplib::Request& req,
                                           httplib::Response& res) {
      const auto task = service.next_task(token_of(req, "annotator"));
      ordered_json body;
      body["task"] = task ? ordered_json::parse(*task) : ordered_json(nullptr);
      send_json(res, 200, body.dump());
    }));
    server.Post("/api/submit", guarded([this](const httplib::Request& req,
                                              httplib::Response& res) {
      send_json(res, 200, service.submit(token_of(req, "annotator"), req.body));
    }));
    server.Get("/api/progress", guarded([this](const httplib::Request& req,
                                               httplib::Response& res) {
      const auto token = token_of(req, "annotator");
      const Progress p = token.empty() ? service.progress() : service.progress(token);
      ordered_json body;
      body["total"] = p.total;
      body["submitted"] = p.submitted;
      send_json(res, 200, body.dump());
    }));
    server.Get("/api/export", guarded([this](const httplib::Request& req,
                                             httplib::Response& res) {
      const auto token = token_of(req, "token");
      if (token.empty()) throw Error(ErrorKind::kAuth, "admin token required");
      if (!service.is_admin(token)) {
        throw Error(ErrorKind::kForbidden, "export requires the admin token");
      }
      std::optional<TaskKind> filter;
      if (req.has_param("task") && !req.get_param_value("task").empty()) {
        filter = parse_task_kind(req.get_param_value("task"));
        if (!filter) {
          throw Error(ErrorKind::kValidation,
                      "unknown task kind '" + req.get_param_value("task") + "'");
        }
      }
      res.status = 200;
      res.set_content(service.export_jsonl(filter), "application/x-ndjson");
    }));
    if (options.ui_dir && !server.set_mount_point("/", options.ui_dir->string())) {
      throw Error(ErrorKind::kMissingInput,
                  "ui directory not found: " + options.ui_dir->string());
    }
  }
};

HttpServer::HttpServer(AnnotationService& service, HttpOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  if (impl_->bound) return impl_->port;
  if (impl_->options.port == 0) {
    impl_->port = impl_->server.bind_to_any_port(impl_->options.host);
  } else if (impl_->server.bind_to_port(impl_->options.host, impl_->options.port)) {
    impl_->port = impl_->options.port;
  } else {
    impl_->port = -1;
  }
  if (impl_->port < 0) {
    throw Error(ErrorKind::kInternal,
                "cannot bind " + impl_->options.host + ":" +
                    std::to_string(impl_->options.port));
  }
  impl_->bound = true;
  return impl_->port;
}

void HttpServer::listen() {
  bind();
  impl_->server.listen_after_bind();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

void HttpServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

}  // namespace ghosteval
