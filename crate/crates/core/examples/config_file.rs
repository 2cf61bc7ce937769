//! Parses a configuration text and prints its normalized form.

use radgas::parse_config;

const TEXT: &str = "\
# a hotter, stiffer variant of the reference preset
[params]
b = 5.5
beta = 1
[grid]
N = 800
boundary = insulated  # reflecting, heat-tight walls
[scenario]
kind = multibump
dtheta = 1.5
[time]
integrator = imex
t_end = 4
";

fn main() -> radgas::Result<()> {
    let cfg = parse_config(TEXT)?;
    print!("{}", cfg.to_text());
    match parse_config("[grid]\nN = 800\nspeed = 3\n") {
        Err(e) => println!("rejected as expected: {e}"),
        Ok(_) => println!("unexpectedly accepted"),
    }
    Ok(())
}
