use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use butterfly_core::ChannelKind;

/// Main output plus any side files.
pub struct Rendered {
    pub text: String,
    pub extra: Vec<(PathBuf, String)>,
}

impl Rendered {
    pub fn new(text: String) -> Self {
        Rendered { text, extra: Vec::new() }
    }

    pub fn write(&self, out: Option<&Path>) -> io::Result<()> {
        match out {
            Some(path) => fs::write(path, &self.text)?,
            None => io::stdout().lock().write_all(self.text.as_bytes())?,
        }
        for (path, body) in &self.extra {
            fs::write(path, body)?;
        }
        Ok(())
    }
}

/// gnuplot script for a sweep CSV.
pub fn plot_script(data: &Path, channel: ChannelKind) -> String {
    let xlabel = match channel {
        ChannelKind::Depolarizing => "p",
        _ => "epsilon",
    };
    let file = data.display().to_string().replace('\'', "\\'");
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set xlabel '{xlabel}'\n\
         set ylabel 'per use per receiver'\n\
         set grid\n\
         plot '{file}' using 1:2 with lines dt 2 lc 'black', \\\n\
         \x20    '' using 1:3 with lines lc 'blue', \\\n\
         \x20    '' using 1:4 with lines lc 'dark-green'\n\
         pause mouse close\n"
    )
}
