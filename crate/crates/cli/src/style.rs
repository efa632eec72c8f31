use std::io::IsTerminal;

/// Text styling controlled by `PRIVARCH_COLOR` (`auto`, `always` or `never`).
#[derive(Clone, Copy, Debug)]
pub struct Style {
    on: bool,
}

impl Style {
    pub fn from_env() -> Result<Style, String> {
        let on = match std::env::var("PRIVARCH_COLOR").as_deref() {
            Err(_) | Ok("auto") => std::io::stdout().is_terminal(),
            Ok("always") => true,
            Ok("never") => false,
            Ok(other) => return Err(format!("PRIVARCH_COLOR must be auto, always or never, not `{other}`")),
        };
        Ok(Style { on })
    }

    fn paint(self, code: &str, s: &str) -> String {
        if self.on {
            format!("\x1b[{code}m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }

    pub fn good(self, s: &str) -> String {
        self.paint("32", s)
    }

    pub fn bad(self, s: &str) -> String {
        self.paint("31", s)
    }

    pub fn note(self, s: &str) -> String {
        self.paint("33", s)
    }

    pub fn bold(self, s: &str) -> String {
        self.paint("1", s)
    }
}
