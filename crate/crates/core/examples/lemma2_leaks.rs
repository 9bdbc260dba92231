//! Announcements that miss a card or share one leak information to Cath.

use delcards::analysis::lemma2_check;
use delcards::cards::{anne, cath};
use delcards::formula::eval;
use delcards::update::labelled_announcement;
use delcards::{build_rcp, product_update, ActionId, Formula, Hand};

fn hands(spec: &[&str]) -> Vec<Hand> {
    spec.iter().map(|s| Hand::new(s.chars().map(|c| c.to_digit(10).unwrap()).collect()).unwrap()).collect()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = build_rcp(3, 1, None)?;
    let label = ActionId::new("alpha")?;
    let w = inst.actual.extended(&label);
    for spec in [&["012", "034", "056", "135", "146", "236", "245"][..], &["012", "034", "056"], &["012"]] {
        let hs = hands(spec);
        let r = lemma2_check(&hs, &inst.universe());
        println!("{spec:?}: covers {}, empty intersection {}", r.covers, r.empty_intersection);

        let f = inst.announcement(&anne(), &hs)?;
        let m = product_update(&inst.model, &labelled_announcement(f, label.clone()))?;
        for i in inst.universe().into_iter().filter(|&i| !inst.actual_deal.c.contains(i)) {
            let with_a = Formula::knows(&cath(), Formula::atom(&anne(), i));
            let not_a = Formula::knows(&cath(), Formula::not(Formula::atom(&anne(), i)));
            if eval(&m, &w, &with_a)? {
                println!("  leak: {with_a}");
            }
            if eval(&m, &w, &not_a)? {
                println!("  leak: {not_a}");
            }
        }
    }
    Ok(())
}
