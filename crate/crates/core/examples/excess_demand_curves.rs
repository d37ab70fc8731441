//! Prints the big-seller and big-buyer excess-demand curves on a grid of
//! mood-index values, plus the mood index of a short price window.

use bigbuyer::{ed6, ed7, mood_index, ModelParams, MoodIndex};

fn main() -> bigbuyer::Result<()> {
    let params = ModelParams::default();
    let w = params.width();

    println!("{:>8} {:>8} {:>8}", "x/w", "ed6", "ed7");
    for step in -10..=10 {
        let x = MoodIndex::new(step as f64 * 0.5 * w)?;
        println!("{:>8.1} {:>8.3} {:>8.3}", x.value() / w, ed6(x, w), ed7(x, w));
    }

    // Today's close against the mean of the last three closes.
    let closes = [20.0, 19.6, 19.1];
    let x = mood_index(&closes, &params)?;
    println!(
        "\ncloses {closes:?}: x = {:.4} ({:.2} w), seller {:.3}, buyer {:.3}",
        x.value(),
        x.value() / w,
        ed6(x, w),
        ed7(x, w)
    );
    Ok(())
}
