//! Fixture tables shared by unit tests.

use crate::table::{comprehend, ComprehendedTable, RawTable};

pub fn raw(name: &str, header: &[&str], rows: &[&[&str]]) -> RawTable {
    RawTable::new(
        name,
        header.iter().map(|s| s.to_string()).collect(),
        rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect(),
    )
}

/// A filmography in the shape of the running example.
pub fn actor_table() -> ComprehendedTable {
    comprehend(&actor_raw())
}

pub fn actor_raw() -> RawTable {
    raw(
        "actor",
        &["Year", "Title", "Role", "Notes", "Actor"],
        &[
            &["1995", "Lost and Found", "Lily", "", "Barton"],
            &["1999", "Notting Hill", "Girl", "", "Barton"],
            &["2001", "Octane", "Natasha", "", "Barton"],
            &["2003", "Pink Sky", "Anna", "also producer", "Barton"],
            &["2005", "Closing Time", "Kate", "", "Barton"],
            &["2007", "Silent Hour", "Meg", "also producer", "Roberts"],
            &["2009", "Homecoming", "Shelby", "", "Roberts"],
        ],
    )
}

pub fn medal_table() -> ComprehendedTable {
    comprehend(&raw(
        "medals",
        &["Rank", "Nation", "Gold", "Silver", "Bronze", "Total"],
        &[
            &["1", "Brazil", "5", "3", "2", "10"],
            &["2", "Argentina", "4", "2", "3", "9"],
            &["3", "Peru", "2", "2", "3", "7"],
            &["4", "Chile", "1", "4", "1", "6"],
            &["5", "Colombia", "0", "1", "3", "4"],
            &["", "Total", "12", "12", "12", "36"],
        ],
    ))
}

pub fn film_table() -> ComprehendedTable {
    comprehend(&raw(
        "films",
        &["Title", "Year", "Director", "Budget"],
        &[
            &["Red Harbor", "2004", "Ann Lee", "12"],
            &["Glass Town", "2006", "Ben Ode", "40"],
            &["Night Train", "2008", "Ann Lee", "25"],
            &["Paper Moon", "2010", "Cy Park", "8"],
        ],
    ))
}

pub fn awards_table() -> ComprehendedTable {
    comprehend(&raw(
        "awards",
        &["Year", "Actor", "Film"],
        &[
            &["1990", "Daniel Day", "Left Foot"],
            &["1991", "Jeremy Irons", "Reversal"],
            &["1992", "Tom Cruise", "Top Flight"],
            &["1993", "Al Pacino", "Scent"],
        ],
    ))
}

pub fn city_table() -> ComprehendedTable {
    comprehend(&raw(
        "cities",
        &["City", "State", "Population"],
        &[
            &["Boston", "Massachusetts", "650000"],
            &["Los Angeles", "California", "3900000"],
            &["San Francisco", "California", "870000"],
            &["Worcester", "Massachusetts", "185000"],
            &["Austin", "Texas", "960000"],
        ],
    ))
}
