from src.models import Dependency, GeneratorSpec, PathologySpec


class Templates:
    symptoms = [
        "itching", "skin_rash", "nodal_skin_eruptions", "continuous_sneezing", "shivering",
        "chills", "joint_pain", "stomach_pain", "acidity", "ulcers_on_tongue",
        "muscle_wasting", "vomiting", "burning_micturition", "spotting_urination", "fatigue",
        "weight_gain", "anxiety", "cold_hands_and_feets", "mood_swings", "weight_loss",
        "restlessness", "lethargy", "patches_in_throat", "irregular_sugar_level", "cough",
        "high_fever", "sunken_eyes", "breathlessness", "sweating", "dehydration",
        "indigestion", "headache", "yellowish_skin", "dark_urine", "nausea",
        "loss_of_appetite", "pain_behind_the_eyes", "back_pain", "constipation", "abdominal_pain",
        "diarrhoea", "mild_fever", "yellow_urine", "yellowing_of_eyes", "acute_liver_failure",
        "fluid_overload", "swelling_of_stomach", "swelled_lymph_nodes", "malaise", "blurred_and_distorted_vision",
        "phlegm", "throat_irritation", "redness_of_eyes", "sinus_pressure", "runny_nose",
        "congestion", "chest_pain", "weakness_in_limbs", "fast_heart_rate", "pain_during_bowel_movements",
        "pain_in_anal_region", "bloody_stool", "irritation_in_anus", "neck_pain", "dizziness",
        "cramps", "bruising", "obesity", "swollen_legs", "swollen_blood_vessels",
        "puffy_face_and_eyes", "enlarged_thyroid", "brittle_nails", "swollen_extremeties", "excessive_hunger",
        "extra_marital_contacts", "drying_and_tingling_lips", "slurred_speech", "knee_pain", "hip_joint_pain",
        "muscle_weakness", "stiff_neck", "swelling_joints", "movement_stiffness", "spinning_movements",
        "loss_of_balance", "unsteadiness", "weakness_of_one_body_side", "loss_of_smell", "bladder_discomfort",
        "foul_smell_of_urine", "continuous_feel_of_urine", "passage_of_gases", "internal_itching", "toxic_look",
        "depression", "irritability", "muscle_pain", "altered_sensorium", "red_spots_over_body",
        "belly_pain", "abnormal_menstruation", "dischromic_patches", "watering_from_eyes", "increased_appetite",
        "polyuria", "family_history", "mucoid_sputum", "rusty_sputum", "lack_of_concentration",
        "visual_disturbances", "receiving_blood_transfusion", "receiving_unsterile_injections", "coma", "stomach_bleeding",
        "distention_of_abdomen", "history_of_alcohol_consumption", "fluid_retention", "blood_in_sputum",
        "prominent_veins_on_calf",
        "palpitations", "painful_walking", "pus_filled_pimples", "blackheads", "scurring",
        "skin_peeling", "silver_like_dusting", "small_dents_in_nails", "inflammatory_nails", "blister",
        "red_sore_around_nose", "yellow_crust_ooze",
    ]

    # Characteristic symptoms and their appearance probability per pathology.
    # Our own calibration: the source probabilities were never published.
    pathologies = {
        "fungal_infection": {"itching": 0.9, "skin_rash": 0.8, "nodal_skin_eruptions": 0.7, "dischromic_patches": 0.7},
        "allergy": {"continuous_sneezing": 0.9, "shivering": 0.7, "chills": 0.7, "watering_from_eyes": 0.8},
        "gerd": {"stomach_pain": 0.8, "acidity": 0.9, "ulcers_on_tongue": 0.6, "vomiting": 0.6, "cough": 0.5,
                 "chest_pain": 0.6},
        "chronic_cholestasis": {"itching": 0.7, "vomiting": 0.6, "yellowish_skin": 0.7, "nausea": 0.7,
                                "loss_of_appetite": 0.7, "abdominal_pain": 0.6, "yellowing_of_eyes": 0.7},
        "drug_reaction": {"itching": 0.6, "skin_rash": 0.7, "stomach_pain": 0.6, "burning_micturition": 0.7,
                          "spotting_urination": 0.7},
        "peptic_ulcer_disease": {"vomiting": 0.7, "indigestion": 0.8, "loss_of_appetite": 0.6, "abdominal_pain": 0.7,
                                 "passage_of_gases": 0.7, "internal_itching": 0.6},
        "aids": {"muscle_wasting": 0.8, "patches_in_throat": 0.8, "high_fever": 0.7, "extra_marital_contacts": 0.9},
        "diabetes": {"fatigue": 0.7, "weight_loss": 0.6, "restlessness": 0.6, "lethargy": 0.7,
                     "irregular_sugar_level": 0.9, "blurred_and_distorted_vision": 0.6, "obesity": 0.6,
                     "excessive_hunger": 0.7, "increased_appetite": 0.7, "polyuria": 0.8},
        "gastroenteritis": {"vomiting": 0.8, "sunken_eyes": 0.7, "dehydration": 0.8, "diarrhoea": 0.9},
        "bronchial_asthma": {"fatigue": 0.6, "cough": 0.8, "high_fever": 0.6, "breathlessness": 0.9,
                             "family_history": 0.7, "mucoid_sputum": 0.8},
        "hypertension": {"headache": 0.8, "chest_pain": 0.7, "dizziness": 0.8, "loss_of_balance": 0.6,
                         "lack_of_concentration": 0.7},
        "migraine": {"acidity": 0.5, "indigestion": 0.5, "headache": 0.9, "blurred_and_distorted_vision": 0.7,
                     "excessive_hunger": 0.5, "stiff_neck": 0.6, "depression": 0.6, "irritability": 0.6,
                     "visual_disturbances": 0.8},
        "cervical_spondylosis": {"back_pain": 0.8, "weakness_in_limbs": 0.7, "neck_pain": 0.9, "dizziness": 0.6,
                                 "loss_of_balance": 0.6},
        "paralysis_brain_hemorrhage": {"vomiting": 0.6, "headache": 0.7, "weakness_of_one_body_side": 0.9,
                                       "altered_sensorium": 0.8},
        "jaundice": {"itching": 0.85, "vomiting": 0.8, "weight_loss": 0.85, "yellowish_skin": 0.9,
                     "dark_urine": 0.9, "abdominal_pain": 0.8},
        "malaria": {"chills": 0.8, "vomiting": 0.6, "high_fever": 0.9, "sweating": 0.8, "headache": 0.7,
                    "nausea": 0.6, "muscle_pain": 0.7},
        "chicken_pox": {"itching": 0.7, "skin_rash": 0.8, "fatigue": 0.6, "lethargy": 0.6, "high_fever": 0.7,
                        "loss_of_appetite": 0.6, "mild_fever": 0.6, "swelled_lymph_nodes": 0.6, "malaise": 0.6,
                        "red_spots_over_body": 0.9},
        "dengue": {"skin_rash": 0.7, "chills": 0.7, "joint_pain": 0.7, "vomiting": 0.6, "high_fever": 0.8,
                   "headache": 0.6, "pain_behind_the_eyes": 0.8, "back_pain": 0.5, "muscle_pain": 0.7,
                   "red_spots_over_body": 0.6},
        "typhoid": {"chills": 0.7, "vomiting": 0.6, "fatigue": 0.6, "high_fever": 0.8, "headache": 0.6,
                    "constipation": 0.7, "abdominal_pain": 0.6, "toxic_look": 0.8, "belly_pain": 0.7},
        "hepatitis_a": {"joint_pain": 0.6, "vomiting": 0.6, "yellowish_skin": 0.7, "dark_urine": 0.7,
                        "nausea": 0.6, "loss_of_appetite": 0.6, "diarrhoea": 0.6, "mild_fever": 0.6,
                        "yellowing_of_eyes": 0.7, "muscle_pain": 0.6},
        "hepatitis_b": {"itching": 0.5, "fatigue": 0.6, "lethargy": 0.6, "yellowish_skin": 0.7, "dark_urine": 0.6,
                        "loss_of_appetite": 0.6, "yellow_urine": 0.7, "yellowing_of_eyes": 0.7, "malaise": 0.6,
                        "receiving_blood_transfusion": 0.7, "receiving_unsterile_injections": 0.7},
        "hepatitis_c": {"fatigue": 0.6, "yellowish_skin": 0.6, "nausea": 0.6, "loss_of_appetite": 0.6,
                        "yellowing_of_eyes": 0.6, "family_history": 0.6},
        "hepatitis_d": {"joint_pain": 0.6, "vomiting": 0.6, "fatigue": 0.6, "yellowish_skin": 0.6,
                        "dark_urine": 0.6, "nausea": 0.6, "loss_of_appetite": 0.6, "abdominal_pain": 0.5,
                        "yellowing_of_eyes": 0.6},
        "hepatitis_e": {"joint_pain": 0.6, "vomiting": 0.6, "fatigue": 0.6, "high_fever": 0.6,
                        "yellowish_skin": 0.6, "dark_urine": 0.6, "nausea": 0.6, "acute_liver_failure": 0.7,
                        "coma": 0.6, "stomach_bleeding": 0.6},
        "alcoholic_hepatitis": {"vomiting": 0.6, "yellowish_skin": 0.6, "abdominal_pain": 0.6,
                                "swelling_of_stomach": 0.7, "distention_of_abdomen": 0.7,
                                "history_of_alcohol_consumption": 0.9, "fluid_retention": 0.6},
        "tuberculosis": {"chills": 0.6, "vomiting": 0.5, "fatigue": 0.6, "weight_loss": 0.6, "cough": 0.8,
                         "high_fever": 0.7, "breathlessness": 0.6, "sweating": 0.6, "loss_of_appetite": 0.6,
                         "mild_fever": 0.5, "swelled_lymph_nodes": 0.6, "malaise": 0.6, "phlegm": 0.7,
                         "chest_pain": 0.6, "blood_in_sputum": 0.8},
        "common_cold": {"continuous_sneezing": 0.8, "chills": 0.6, "fatigue": 0.6, "cough": 0.7,
                        "high_fever": 0.6, "headache": 0.6, "swelled_lymph_nodes": 0.5, "malaise": 0.6,
                        "phlegm": 0.6, "throat_irritation": 0.7, "redness_of_eyes": 0.6, "sinus_pressure": 0.7,
                        "runny_nose": 0.8, "congestion": 0.8, "chest_pain": 0.4, "loss_of_smell": 0.6,
                        "muscle_pain": 0.5},
        "pneumonia": {"chills": 0.7, "fatigue": 0.6, "cough": 0.8, "high_fever": 0.8, "breathlessness": 0.8,
                      "sweating": 0.6, "malaise": 0.6, "phlegm": 0.7, "chest_pain": 0.7, "fast_heart_rate": 0.6,
                      "rusty_sputum": 0.8},
        "dimorphic_hemorrhoids": {"constipation": 0.7, "pain_during_bowel_movements": 0.8,
                                  "pain_in_anal_region": 0.8, "bloody_stool": 0.8, "irritation_in_anus": 0.8},
        "heart_attack": {"vomiting": 0.6, "breathlessness": 0.7, "sweating": 0.7, "chest_pain": 0.9},
        "varicose_veins": {"fatigue": 0.5, "cramps": 0.7, "bruising": 0.7, "obesity": 0.6, "swollen_legs": 0.8,
                           "swollen_blood_vessels": 0.8, "prominent_veins_on_calf": 0.9},
        "hypothyroidism": {"fatigue": 0.6, "weight_gain": 0.7, "cold_hands_and_feets": 0.7, "mood_swings": 0.6,
                           "lethargy": 0.6, "dizziness": 0.5, "puffy_face_and_eyes": 0.8, "enlarged_thyroid": 0.8,
                           "brittle_nails": 0.7, "swollen_extremeties": 0.7, "depression": 0.5,
                           "irritability": 0.5, "abnormal_menstruation": 0.6},
        "hyperthyroidism": {"fatigue": 0.6, "mood_swings": 0.6, "weight_loss": 0.6, "restlessness": 0.6,
                            "sweating": 0.6, "diarrhoea": 0.5, "fast_heart_rate": 0.7, "excessive_hunger": 0.6,
                            "muscle_weakness": 0.6, "irritability": 0.6, "abnormal_menstruation": 0.6},
        "hypoglycemia": {"vomiting": 0.5, "fatigue": 0.6, "anxiety": 0.7, "sweating": 0.7, "headache": 0.6,
                         "nausea": 0.5, "blurred_and_distorted_vision": 0.6, "excessive_hunger": 0.7,
                         "drying_and_tingling_lips": 0.8, "slurred_speech": 0.7, "irritability": 0.6,
                         "palpitations": 0.8},
        "osteoarthritis": {"joint_pain": 0.8, "neck_pain": 0.6, "knee_pain": 0.8, "hip_joint_pain": 0.8,
                           "swelling_joints": 0.7, "painful_walking": 0.8},
        "arthritis": {"muscle_weakness": 0.7, "stiff_neck": 0.6, "swelling_joints": 0.8,
                      "movement_stiffness": 0.8, "painful_walking": 0.7},
        "paroxysmal_positional_vertigo": {"vomiting": 0.6, "headache": 0.6, "nausea": 0.6,
                                          "spinning_movements": 0.9, "loss_of_balance": 0.8, "unsteadiness": 0.8},
        "acne": {"skin_rash": 0.7, "pus_filled_pimples": 0.9, "blackheads": 0.8, "scurring": 0.7},
        "urinary_tract_infection": {"burning_micturition": 0.8, "bladder_discomfort": 0.8,
                                    "foul_smell_of_urine": 0.7, "continuous_feel_of_urine": 0.8,
                                    "spotting_urination": 0.6},
        "psoriasis": {"skin_rash": 0.7, "joint_pain": 0.6, "skin_peeling": 0.8, "silver_like_dusting": 0.9,
                      "small_dents_in_nails": 0.7, "inflammatory_nails": 0.7},
        "impetigo": {"skin_rash": 0.7, "high_fever": 0.6, "blister": 0.8, "red_sore_around_nose": 0.8,
                     "yellow_crust_ooze": 0.9},
    }

    sequential = {
        "gilbert_syndrome": {
            "symptom_probs": {"cough": 0.5, "high_fever": 0.5, "yellowish_skin": 0.5},
            "depends_on": {"pathology": "jaundice", "prob_given_present": 0.75, "prob_given_absent": 0.003},
        },
    }

    def builtin_medical_spec(self, patients_per_pathology: int = 500, seed: int = 0) -> GeneratorSpec:
        """Medical benchmark: 41 primary pathologies over 132 binary symptoms, plus Gilbert's syndrome"""
        return GeneratorSpec(
            symptoms=list(self.symptoms),
            pathologies=[
                PathologySpec(name=name, patients_per_pathology=patients_per_pathology, symptom_probs=probs)
                for name, probs in self.pathologies.items()
            ],
            sequential=[
                PathologySpec(
                    name=name,
                    symptom_probs=entry["symptom_probs"],
                    depends_on=Dependency(**entry["depends_on"]),
                )
                for name, entry in self.sequential.items()
            ],
            labels=["jaundice", "gilbert_syndrome"],
            baseline_noise=0.01,
            seed=seed,
        )


templates = Templates()
