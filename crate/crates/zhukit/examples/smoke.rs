use zhukit::zhu::*;
use zhukit::rational::rat_int;

fn main() {
    for (t, b) in [(6u32, 10i64), (9, 10), (9, 13)] {
        let key = MuKey { t, b, i1: 2, a_int: 4 };
        let t0 = std::time::Instant::now();
        let mut bat = MuBattery::new(key).unwrap();
        let t_build = t0.elapsed();
        let t0 = std::time::Instant::now();
        // typical product polynomial needs: one sector, ~20 anchors
        let terms: Vec<_> = (0..3).map(|i| (rat_int(1), 3 - i)).collect();
        let p = bat.weighted_kernel(2, &rat_int(5), &terms);
        println!("T'={t} b={b} D={}: build {:?}, kernel {:?}, terms={}",
            t as i64 * b, t_build, t0.elapsed(), p.support_len());
    }
}
