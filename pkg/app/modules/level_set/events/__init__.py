# This file marks the events module as a package for import.
